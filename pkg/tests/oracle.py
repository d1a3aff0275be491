"""High-precision, unpruned orthogeodesic oracle.

Places every hexagon with its own mpmath frames and walks all
non-backtracking dual paths, so it shares no code with the engine beyond the
gluing data.
"""

from mpmath import mp, mpf, matrix, cosh, sinh, acosh, asinh, sqrt


def _T(d):
    c, s = cosh(d), sinh(d)
    return matrix([[c, 0, s], [0, 1, 0], [s, 0, c]])


_QUARTER = matrix([[0, -1, 0], [1, 0, 0], [0, 0, 1]])
_FLIP = matrix([[-1, 0, 0], [0, -1, 0], [0, 0, 1]])
_Q = matrix([[1, 0, 0], [0, 1, 0], [0, 0, -1]])


def _opp(a, b, c):
    return acosh((cosh(a) + cosh(b) * cosh(c)) / (sinh(b) * sinh(c)))


def _frames(a, b, c):
    sides = [a, _opp(c, a, b), b, _opp(a, b, c), c, _opp(b, c, a)]
    g = mp.eye(3)
    frames = []
    for L in sides:
        frames.append(g)
        g = g * _T(L) * _QUARTER
    return sides, frames


def _normal(frame):
    return frame * matrix([0, 1, 0])


def _q(u, w):
    return u[0] * w[0] + u[1] * w[1] - u[2] * w[2]


def _inv(M):
    return _Q * M.T * _Q


def all_lengths(decomposition, arc_lengths, max_crossings, dps=40, same_line=None):
    """Sorted lengths of every candidate orthogeodesic with at most ``max_crossings`` crossings.

    Candidates whose end line coincides with the start line are dropped.
    Intersecting pairs are dropped too; they cannot be boundary lifts.
    """
    d = decomposition
    with mp.workdps(dps):
        # rounding in w is about eps |G| |frames|; acosh near 1 turns an error e in q into sqrt(2 e)
        eps = mpf(10) ** -dps
        x = [mpf(v) for v in arc_lengths]
        geo = {}
        for h in range(d.num_hexagons):
            arcs = d.hexagon_arcs(h)
            geo[h] = _frames(*(x[a] for a in arcs))
        big = max(mp.mnorm(f, 1) for h in geo for f in geo[h][1])
        cross = {}
        for (h, s), (h2, s2) in d.partner.items():
            sides, frames = geo[h]
            cross[(h, s)] = frames[s] * _T(sides[s]) * _FLIP * _inv(geo[h2][1][s2])
        out = []
        for h0 in range(d.num_hexagons):
            for t0 in (1, 3, 5):
                u = _normal(geo[h0][1][t0])
                stack = [(mp.eye(3), h0, None, 0)]
                while stack:
                    G, h, entry, m = stack.pop()
                    for t in (1, 3, 5):
                        if m == 0 and t == t0:
                            continue
                        w = G * _normal(geo[h][1][t])
                        c = abs(_q(u, w))
                        if c <= 1:
                            continue
                        dist = acosh(c)
                        if same_line is None:
                            floor = 100 * sqrt(2 * eps * mp.mnorm(G, 1) * big * mp.norm(u))
                        else:
                            floor = same_line
                        if dist > floor:
                            out.append(float(dist))
                    if m == max_crossings:
                        continue
                    for s in (0, 2, 4):
                        if s == entry:
                            continue
                        h2, s2 = d.partner[(h, s)]
                        stack.append((G * cross[(h, s)], h2, s2, m + 1))
        return sorted(out)
