"""Dense-grid minimum-modulus oracle for complex zeros of
F(xi, lam) = int exp(2 lam (xi x - phi(x))) dx.

Stage 1: grid of log|F| with F from 30-digit mpmath.quad (a double-precision
real-axis sum cancels too deeply to see every zero).
Stage 2: each candidate local minimum, plus a uniform 6x6 seed lattice, refined
with mpmath.findroot on a 50-digit mpmath.quad evaluation of F. A coarse grid can
sit between closely stacked zeros, hence the lattice.
Stage 3: argument-principle count (F'/F integrated over the box boundary) must
equal the number of distinct roots found. Prints the frozen roots.
"""
import numpy as np
import mpmath as mp

mp.mp.dps = 50


def grid_candidates(phi_mp, lam, box, n=41, depth=2.0):
    s = np.linspace(box[0], box[1], n)
    t = np.linspace(box[2], box[3], n)
    A = np.empty((n, n))
    with mp.workdps(30):
        for i in range(n):
            for j in range(n):
                xi = mp.mpc(s[i], t[j])
                v = mp.quad(lambda x: mp.exp(2 * lam * (xi * x - phi_mp(x))), mp.linspace(-4, 4, 33))
                A[i, j] = float(mp.log(abs(v)))
    med = np.median(np.concatenate([A[0], A[-1], A[:, 0], A[:, -1]]))
    out = []
    for i in range(1, n - 1):
        for j in range(1, n - 1):
            nb = np.delete(A[i - 1:i + 2, j - 1:j + 2].ravel(), 4)
            if A[i, j] < nb.min() and A[i, j] < med - depth:
                out.append(complex(s[i], t[j]))
    return out


def refine(phi_mp, lam, z0):
    def F(xi):
        return mp.quad(lambda x: mp.exp(2 * lam * (xi * x - phi_mp(x))), mp.linspace(-4, 4, 65))
    return mp.findroot(F, mp.mpc(z0))


def lattice(box, m=6):
    return [complex(box[0] + (i + 0.5) * (box[1] - box[0]) / m, box[2] + (j + 0.5) * (box[3] - box[2]) / m)
            for i in range(m) for j in range(m)]


def argument_count(phi_mp, lam, box):
    def F(xi):
        return mp.quad(lambda x: mp.exp(2 * lam * (xi * x - phi_mp(x))), mp.linspace(-4, 4, 33))

    def dF(xi):
        return mp.quad(lambda x: 2 * lam * x * mp.exp(2 * lam * (xi * x - phi_mp(x))), mp.linspace(-4, 4, 33))

    a, b, c, d = box
    corners = [mp.mpc(a, c), mp.mpc(b, c), mp.mpc(b, d), mp.mpc(a, d), mp.mpc(a, c)]
    with mp.workdps(30):
        total = 0
        for p, q in zip(corners[:-1], corners[1:]):
            total += mp.quad(lambda t: dF(p + t * (q - p)) / F(p + t * (q - p)) * (q - p), [0, 0.25, 0.5, 0.75, 1])
    return int(mp.nint((total / (2j * mp.pi)).real))


def run(name, phi, phi_mp, lam, box):
    cands = grid_candidates(phi_mp, lam, box) + lattice(box)
    roots = []
    for c in cands:
        try:
            r = refine(phi_mp, lam, c)
        except (ValueError, ZeroDivisionError):
            continue
        if box[0] <= r.real <= box[1] and box[2] <= r.imag <= box[3]:
            if all(abs(r - q) > 1e-10 for q in roots):
                roots.append(r)
    roots.sort(key=lambda r: (float(r.imag), float(r.real)))
    count = argument_count(phi_mp, lam, box)
    assert count == len(roots), (count, len(roots))
    print(name, lam, box, "winding", count)
    for r in roots:
        print("  ", mp.nstr(r.real, 17), mp.nstr(r.imag, 17))


if __name__ == "__main__":
    run("quartic[1,0.25]", lambda x: x**2 / 2 + x**4 / 4,
        lambda x: x**2 / 2 + x**4 / 4, 40, (-0.6, 0.6, -0.6, 0.6))
    run("analytic_trig[1,0.025,6]", lambda x: x**2 / 2 + 0.025 * (1 - np.cos(6 * x)),
        lambda x: x**2 / 2 + mp.mpf('0.025') * (1 - mp.cos(6 * x)), 40, (0.3, 0.7, 0.6, 0.9))
