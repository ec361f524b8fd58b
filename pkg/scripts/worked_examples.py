"""Walk through the hand-checkable examples and print each result.

    python scripts/worked_examples.py
"""
from __future__ import annotations

import numpy as np

from ccrcocycle.endo import NormalHom, apply, distinct_subordinates, same_subordinate, unit
from ccrcocycle.generators import projection_generator, theta_pair
from ccrcocycle.matcore import opnorm
from ccrcocycle.subordination import build_chain, can_extend_above, compare, construct_intertwiner

np.set_printoptions(precision=3, suppress=True)


def show(title, value):
    print(f"{title}:\n{value}\n")


def main():
    # X^F <= X^G for n = 1, d = 2
    F = projection_generator(np.array([[0], [1]]), np.zeros((2, 2)), 1, 2)
    G = projection_generator(np.array([[0], [1]]), np.diag([1.0, 0.0]), 1, 2)
    rep = compare(G, F)
    show("G + G Delta F (dominates example)", G.matrix() + G.matrix() @ np.diag([0, 1, 1]) @ F.matrix())
    print(f"dominates(G, F) = {rep.holds}, residuals {rep.residuals}")
    print(f"dominates(F, G) = {compare(F, G).holds}\n")

    # an intertwiner between P = diag(1, 0) and Q = diag(0, 1)
    F = projection_generator(np.zeros((2, 1)), np.diag([1.0, 0.0]), 1, 2)
    G = projection_generator(np.zeros((2, 1)), np.diag([0.0, 1.0]), 1, 2)
    H = construct_intertwiner(F, G, np.array([[0, 0], [1, 0]]))
    show("intertwiner H", H.matrix().real)
    tf, tg = theta_pair(H)
    print(f"theta_pair(H) == (F, G): {np.array_equal(tf, F.matrix()) and np.array_equal(tg, G.matrix())}\n")

    # maximal chains of local subordinates
    for d in range(1, 6):
        chain = build_chain(d)
        print(f"d = {d}: chain length {len(chain)}, extendable above: {can_extend_above(chain)}")
    print()

    # S -> S + 0 on C^2 -> C^3 has exactly the subordinates alpha and 0
    embed = NormalHom(2, 1, 3, np.eye(3)[:, :2])
    S = np.array([[1.0, 2.0], [3.0, 4.0]])
    for P, gamma in distinct_subordinates(embed):
        print(f"P = diag{np.diag(P).real.tolist()}: ||gamma(S)|| = {opnorm(gamma(S)):.3f}")
    print(f"||alpha(S)|| = {opnorm(apply(embed, S)):.3f}")
    print(f"same_subordinate(I, alpha(I)) = {same_subordinate(embed, np.eye(3), unit(embed))}")


if __name__ == "__main__":
    main()
