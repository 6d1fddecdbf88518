#!/usr/bin/env python3
"""Regenerate the JSON corpus under data/.

Conventions match the repvol input format:
  * face f of a simplex is the face opposite vertex position f;
  * vertex_map lists, for the positions of the `from` simplex other than f
    (increasing order), the matching position in the `to` simplex;
  * the transition g of a gluing satisfies  x_from = g . x_to  for the
    local coordinates of every shared vertex.
"""
import cmath
import itertools
import json
import math
import os
import random

INF = None  # homogeneous (1, 0)


def hom(p):
    return (1 + 0j, 0j) if p is INF else (complex(p), 1 + 0j)


def bracket(a, b):
    return a[0] * b[1] - a[1] * b[0]


def mat_mul(a, b):
    return [[a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]]]


def normalize(m):
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    s = cmath.sqrt(det)
    return [[x / s for x in row] for row in m]


def inv(m):
    return [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]]


def to_zero_one_inf(p1, p2, p3):
    a, b, c = hom(p1), hom(p2), hom(p3)
    k1 = bracket(b, c)
    k3 = bracket(b, a)
    return normalize([[k1 * a[1], -k1 * a[0]], [k3 * c[1], -k3 * c[0]]])


def moebius_between(src, dst):
    """Möbius map sending the three points src to dst."""
    return normalize(mat_mul(inv(to_zero_one_inf(*dst)), to_zero_one_inf(*src)))


def identity():
    return [[1 + 0j, 0j], [0j, 1 + 0j]]


def close_to_pm_identity(m, tol=1e-9):
    return min(max(abs(m[0][0] - s), abs(m[0][1]), abs(m[1][0]), abs(m[1][1] - s)) for s in (1, -1)) < tol


def act(m, p):
    u, v = hom(p)
    nu, nv = m[0][0] * u + m[0][1] * v, m[1][0] * u + m[1][1] * v
    if abs(nv) < 1e-14 * max(1.0, abs(nu)):
        return INF
    return nu / nv


class Complex:
    def __init__(self, n, nsimp, perms, signs):
        # perms[s][f] = (to_simplex, full position permutation)
        self.n, self.nsimp, self.perms, self.signs = n, nsimp, perms, signs

    def gluings(self):
        out = []
        for s in range(self.nsimp):
            for f in range(self.n + 1):
                t, p = self.perms[s][f]
                if (s, f) <= (t, p[f]):
                    out.append((s, f, t, p[f], [p[k] for k in range(self.n + 1) if k != f]))
        return out

    def cocycle_from_realization(self, Q):
        g = {}
        for s in range(self.nsimp):
            for f in range(self.n + 1):
                t, p = self.perms[s][f]
                ks = [k for k in range(self.n + 1) if k != f]
                src = [Q[t][p[k]] for k in ks]
                dst = [Q[s][k] for k in ks]
                g[(s, f)] = moebius_between(src, dst)
        return g

    def corner_transports(self, g):
        """BFS over corners; returns (rep corner per class, T per corner, loops per class)."""
        n = self.n
        T, cls, reps, loops = {}, {}, [], []
        for s in range(self.nsimp):
            for k in range(n + 1):
                if (s, k) in T:
                    continue
                cid = len(reps)
                reps.append((s, k))
                loops.append([])
                T[(s, k)] = identity()
                cls[(s, k)] = cid
                queue = [(s, k)]
                while queue:
                    c = queue.pop(0)
                    cs, ck = c
                    for f in range(n + 1):
                        if f == ck:
                            continue
                        t, p = self.perms[cs][f]
                        other = (t, p[ck])
                        gg = g[(cs, f)]
                        # x_c = gg . x_other  => T_other = gg^-1 T_c
                        cand = normalize(mat_mul(inv(gg), T[c]))
                        if other not in T:
                            T[other] = cand
                            cls[other] = cid
                            queue.append(other)
                        else:
                            loop = normalize(mat_mul(inv(T[c]), mat_mul(gg, T[other])))
                            if not close_to_pm_identity(loop):
                                loops[cid].append(loop)
        return reps, T, cls, loops


def inverse_perm(p):
    q = [0] * len(p)
    for i, x in enumerate(p):
        q[x] = i
    return q


def fig8():
    snap = {0: (["0132", "1230", "2310", "2103"], [1, 1, 1, 1]),
            1: (["0132", "3201", "3012", "2103"], [0, 0, 0, 0])}
    perms = {s: [(snap[s][1][f], [int(c) for c in snap[s][0][f]]) for f in range(4)] for s in snap}
    return Complex(3, 2, perms, [1, 1])


def gauge_fix(cx, g, tree):
    """tree: list of (s, f) slots that become identity; frames by BFS from simplex 0."""
    h = {0: identity()}
    changed = True
    while changed:
        changed = False
        for (s, f) in tree:
            t, p = cx.perms[s][f]
            if s in h and t not in h:
                h[t] = normalize(mat_mul(h[s], g[(s, f)]))
                changed = True
            elif t in h and s not in h:
                h[s] = normalize(mat_mul(h[t], g[(t, p[f])]))
                changed = True
    out = {}
    for (s, f), gg in g.items():
        t, _ = cx.perms[s][f]
        out[(s, f)] = normalize(mat_mul(h[s], mat_mul(gg, inv(h[t]))))
    return out


def c2json(z):
    return [z.real + 0.0, z.imag + 0.0]


def mjson(m, n):
    if n == 2:
        return [[m[0][0].real + 0.0, m[0][1].real + 0.0], [m[1][0].real + 0.0, m[1][1].real + 0.0]]
    return [[c2json(m[0][0]), c2json(m[0][1])], [c2json(m[1][0]), c2json(m[1][1])]]


def canonical_sign(m):
    for row in m:
        for x in row:
            if abs(x) > 0:
                if x.real < 0 or (x.real == 0 and x.imag < 0):
                    return [[-y for y in r] for r in m]
                return m
    return m


def document(cx, g, peripheral, vertex_kinds, simplex_vertices, words=None, generators=None):
    n = cx.n
    glu = []
    for (s, f, t, f2, vm) in cx.gluings():
        entry = {"from": [s, f], "to": [t, f2], "vertex_map": vm}
        if words is not None:
            entry["transition"] = {"word": words[(s, f)]}
        else:
            entry["transition"] = mjson(canonical_sign(g[(s, f)]), n)
        glu.append(entry)
    doc = {
        "dimension": n,
        "vertices": [{"id": i, "kind": k} for i, k in enumerate(vertex_kinds)],
        "simplices": [{"id": s, "vertices": simplex_vertices[s], "sign": cx.signs[s]} for s in range(cx.nsimp)],
        "gluings": glu,
    }
    if generators is not None:
        doc["generators"] = {k: mjson(canonical_sign(v), n) for k, v in generators.items()}
    doc["peripheral"] = {str(v): [mjson(canonical_sign(m), n) for m in ms] for v, ms in peripheral.items()}
    return doc


def mat_eq_pm(a, b, tol=1e-9):
    return close_to_pm_identity(normalize(mat_mul(a, inv(b))), tol)


def find_word(target, gens, max_len=6):
    letters = []
    for name, m in gens.items():
        letters.append((name, m))
        letters.append((name + "^-1", inv(m)))
    for length in range(1, max_len + 1):
        for combo in itertools.product(letters, repeat=length):
            m = identity()
            for _, x in combo:
                m = mat_mul(m, x)
            if mat_eq_pm(m, target):
                return " ".join(name for name, _ in combo)
    return None


def edge_cycles(cx):
    """Edge classes of a 3-complex as lists of crossed slots (s, f)."""
    seen, cycles = set(), []
    for s in range(cx.nsimp):
        for i, j in itertools.combinations(range(4), 2):
            if (s, i, j) in seen:
                continue
            k, l = [x for x in range(4) if x not in (i, j)]
            start = (s, i, j, k, l)
            cur, slots = start, []
            while True:
                cs, ci, cj, ck, cl = cur
                seen.add((cs, min(ci, cj), max(ci, cj)))
                slots.append((cs, ck))
                t, p = cx.perms[cs][ck]
                cur = (t, p[ci], p[cj], p[cl], p[ck])
                if cur[0] == s and {cur[1], cur[2]} == {i, j} and cur[3] == k:
                    break
            cycles.append(slots)
    return cycles


def main():
    out = os.path.join(os.path.dirname(__file__), "..", "data")
    random.seed(20240607)
    w = cmath.exp(1j * math.pi / 3)

    # ---------------- figure-eight knot complement ----------------
    cx = fig8()
    Q = {0: [INF, 0, 1, w.conjugate()], 1: [INF, 0, 1, w.conjugate()]}
    g = cx.cocycle_from_realization(Q)
    tree = [(0, 0)]
    g = gauge_fix(cx, g, tree)
    reps, T, cls, loops = cx.corner_transports(g)
    classes = sorted(set(cls.values()))
    assert len(classes) == 1, classes
    first = loops[0][0]
    second = next(m for m in loops[0][1:]
                  if abs(((m[0][1] / m[0][0]) / (first[0][1] / first[0][0])).imag) > 1e-6)
    periph = {0: [first, second]}
    for m in periph[0]:
        assert abs(act(m, INF) if act(m, INF) is not INF else 0) == 0
    sv = [[0, 0, 0, 0], [0, 0, 0, 0]]
    kinds = ["ideal"]
    with open(os.path.join(out, "figure8.json"), "w") as fh:
        json.dump(document(cx, g, periph, kinds, sv), fh, indent=2)

    # words: the non-tree slots of simplex 0 generate
    gens_all = {}
    slot_names = {}
    names = iter("abc")
    for (s, f, t, f2, vm) in cx.gluings():
        if (s, f) in tree:
            continue
        nm = next(names)
        gens_all[nm] = g[(s, f)]
        slot_names[(s, f)] = nm
    words = {(s, f): slot_names.get((s, f), "") for (s, f, *_rest) in cx.gluings()}
    w_c = find_word(gens_all["c"], {"a": gens_all["a"], "b": gens_all["b"]})
    gens = dict(gens_all)
    if w_c is not None:
        del gens["c"]
        for k, v in list(words.items()):
            if v == "c":
                words[k] = w_c
    print("fig8 word for c:", w_c)
    with open(os.path.join(out, "figure8_words.json"), "w") as fh:
        json.dump(document(cx, g, periph, kinds, sv, words=words, generators=gens), fh, indent=2)

    # abelianization from edge relations
    cyc = edge_cycles(cx)
    gen_slots = [k for k in slot_names]
    rows = []
    for slots in cyc:
        row = [0] * len(gen_slots)
        for (s, f) in slots:
            t, p = cx.perms[s][f]
            if (s, f) in slot_names:
                row[gen_slots.index((s, f))] += 1
            elif (t, p[f]) in slot_names:
                row[gen_slots.index((t, p[f]))] -= 1
        rows.append(row)
    print("edge relation exponents:", rows)
    r1, r2 = rows
    phi = [r1[1] * r2[2] - r1[2] * r2[1], r1[2] * r2[0] - r1[0] * r2[2], r1[0] * r2[1] - r1[1] * r2[0]]
    gg = math.gcd(math.gcd(abs(phi[0]), abs(phi[1])), abs(phi[2]))
    phi = [x // gg for x in phi]
    print("abelianization:", phi)
    minors = [abs(x) for x in [r1[1] * r2[2] - r1[2] * r2[1], r1[2] * r2[0] - r1[0] * r2[2], r1[0] * r2[1] - r1[1] * r2[0]]]
    print("gcd of 2x2 minors (torsion order):", gg, "minors", minors)

    # trivial representation on the figure-eight combinatorics
    triv = {k: identity() for k in g}
    with open(os.path.join(out, "figure8_trivial.json"), "w") as fh:
        json.dump(document(cx, triv, {0: [identity()]}, kinds, sv), fh, indent=2)

    # perturbed geometric cocycle (one entry moved by 1e-3)
    broken = {k: [row[:] for row in v] for k, v in g.items()}
    key = (0, 1)
    broken[key][0][1] += 1e-3
    broken[key] = normalize(broken[key])
    t, p = cx.perms[0][1]
    broken[(t, p[1])] = inv(broken[key])
    with open(os.path.join(out, "figure8_broken.json"), "w") as fh:
        json.dump(document(cx, broken, periph, kinds, sv), fh, indent=2)

    # reducible representation: abelianization into an upper-triangular group,
    # then a random upper-triangular gauge per simplex
    mu, tau = 1.3 + 0.2j, 0.7 - 0.4j
    U = [[mu, tau], [0j, 1 / mu]]

    def upow(k):
        m = identity()
        base = U if k >= 0 else inv(U)
        for _ in range(abs(k)):
            m = mat_mul(m, base)
        return m

    ab = {}
    for (s, f), v in g.items():
        t, p = cx.perms[s][f]
        if (s, f) in slot_names:
            ab[(s, f)] = upow(phi[gen_slots.index((s, f))])
        elif (t, p[f]) in slot_names:
            ab[(s, f)] = inv(upow(phi[gen_slots.index((t, p[f]))]))
        else:
            ab[(s, f)] = identity()
    gauge = {0: identity(),
             1: normalize([[complex(random.uniform(0.5, 2), random.uniform(-1, 1)), complex(random.uniform(-1, 1), random.uniform(-1, 1))], [0j, 1 + 0j]])}
    ab = {(s, f): normalize(mat_mul(gauge[s], mat_mul(m, inv(gauge[cx.perms[s][f][0]])))) for (s, f), m in ab.items()}
    _, _, _, ab_loops = cx.corner_transports(ab)
    ab_periph = {0: ab_loops[0][:2] if ab_loops[0] else [identity()]}
    with open(os.path.join(out, "figure8_upper.json"), "w") as fh:
        json.dump(document(cx, ab, ab_periph, kinds, sv), fh, indent=2)

    # ---------------- once-punctured torus ----------------
    # T0 = (0, 1, inf), T1 = (-1, 0, inf); side pairings A, B of the ideal quadrilateral.
    A = [[2 + 0j, 1 + 0j], [1 + 0j, 1 + 0j]]
    B = [[2 + 0j, -1 + 0j], [-1 + 0j, 1 + 0j]]
    perms = {
        0: [(1, [2, 1, 0]), (1, [1, 0, 2]), (1, [0, 2, 1])],
        1: [(0, [1, 0, 2]), (0, [0, 2, 1]), (0, [2, 1, 0])],
    }
    # check involution
    for s in perms:
        for f in range(3):
            t, p = perms[s][f]
            t2, p2 = perms[t][p[f]]
            assert t2 == s and [p2[p[i]] for i in range(3)] == [0, 1, 2], (s, f)
    pt = Complex(2, 2, perms, [1, 1])
    g2 = {(0, 1): identity(), (1, 0): identity(),
          (1, 1): B, (0, 2): inv(B),
          (0, 0): A, (1, 2): inv(A)}
    QT = {0: [0, 1, INF], 1: [-1, 0, INF]}
    for (s, f), m in g2.items():
        t, p = perms[s][f]
        for k in range(3):
            if k == f:
                continue
            img = act(m, QT[t][p[k]])
            want = QT[s][k]
            assert (img is INF and want is INF) or (img is not INF and want is not INF and abs(img - want) < 1e-12), (s, f, k, img, want)
    _, _, pcls, ploops = pt.corner_transports(g2)
    assert len(set(pcls.values())) == 1
    pkinds = ["ideal"]
    psv = [[0, 0, 0], [0, 0, 0]]
    with open(os.path.join(out, "punctured_torus.json"), "w") as fh:
        json.dump(document(pt, g2, {0: ploops[0][:1]}, pkinds, psv), fh, indent=2)
    trivial2 = {k: identity() for k in g2}
    with open(os.path.join(out, "punctured_torus_trivial.json"), "w") as fh:
        json.dump(document(pt, trivial2, {0: [identity()]}, pkinds, psv), fh, indent=2)
    print("punctured torus peripheral:", ploops[0][:1])


if __name__ == "__main__":
    main()
