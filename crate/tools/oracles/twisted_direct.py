"""Independent values of the local Weyl coefficients for the twisted model.

The principal symbol is A(x, xi) = a(x, xi) I + d(x, xi) . sigma with
a = 2 eps sin(x1) xi1 and d = (xi1, xi2, eps sin(x1) xi2). Eigenprojections
P = (I +- u . sigma) / 2 with u = d / |d| are differentiated symbolically and
the cosphere integrals are evaluated with mpmath at 40 digits.
"""

import mpmath as mp
import sympy as sp

mp.mp.dps = 40

x1, x2, k1, k2, eps, beta = sp.symbols("x1 x2 k1 k2 eps beta", real=True)
I2 = sp.eye(2)
sig = [sp.Matrix([[0, 1], [1, 0]]), sp.Matrix([[0, -sp.I], [sp.I, 0]]), sp.Matrix([[1, 0], [0, -1]])]
s = sp.sin(x1)
a = 2 * eps * s * k1
d = [k1, k2, eps * s * k2]
nd = sp.sqrt(sum(c**2 for c in d))
A = a * I2 + sum((d[i] * sig[i] for i in range(3)), sp.zeros(2))
X = [x1, x2]
K = [k1, k2]


def gbr(F, G, H):
    return sum(
        (sp.diff(F, X[i]) * G * sp.diff(H, K[i]) - sp.diff(F, K[i]) * G * sp.diff(H, X[i]) for i in range(2)),
        sp.zeros(2),
    )


def sheet(sign):
    u = [c / nd for c in d]
    P = (I2 + sign * sum((u[i] * sig[i] for i in range(3)), sp.zeros(2))) / 2
    h = a + sign * nd
    B = beta * I2
    t_sub = (B * P).trace()
    t_br = gbr(P, A - h * I2, P).trace()
    t_curv = gbr(P, P, P).trace()
    dens = -(t_sub - sp.I / 2 * t_br) + sp.I * h * t_curv
    f = sp.lambdify((x1, x2, k1, k2, eps, beta), [h, dens], "mpmath")
    return f


SHEETS = {1: sheet(1), -1: sheet(-1)}


def coefficients(x, e, b=0.0, nodes=256, sign=1):
    """(a1, a0) at x for the branch of the given sign; n = 2.

    The negative branch is that of -A, which flips the sign of the density.
    """
    tot1 = mp.mpf(0)
    tot0 = mp.mpc(0)
    for j in range(nodes):
        t = 2 * mp.pi * j / nodes
        h, dens = SHEETS[sign](mp.mpf(x[0]), mp.mpf(x[1]), mp.cos(t), mp.sin(t), mp.mpf(e), mp.mpf(b))
        w = 2 * mp.pi / nodes * abs(h) ** (-2)
        tot1 += w
        tot0 += w * dens
    norm = 1 / (2 * mp.pi) ** 2
    return norm * tot1, sign * norm * tot0


if __name__ == "__main__":
    for x in [0.1, 0.3, 0.5, 0.7, 0.9, 1.1, 1.3, 1.5]:
        a1, a0 = coefficients((x, 0.3), 0.1)
        print(f"{x}: a1 = {mp.nstr(a1, 17)}, a0 = {mp.nstr(a0.real, 17)} (imag {mp.nstr(a0.imag, 3)})")
    a1, a0 = coefficients((0.5, 0.3), 0.0, 0.3)
    print("dirac shift 0.3:", mp.nstr(a1, 17), mp.nstr(a0.real, 17))
    for b in [0.0, 0.3]:
        a1, a0 = coefficients((0.5, 0.3), 0.1, b, sign=-1)
        print(f"minus branch, beta {b}:", mp.nstr(a1, 17), mp.nstr(a0.real, 17))
    a1, a0 = coefficients((0.5, 0.3), 0.1, 0.0, nodes=512)
    print("0.5 at 512 nodes:", mp.nstr(a1, 17), mp.nstr(a0.real, 17))
