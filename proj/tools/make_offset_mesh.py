#!/usr/bin/env python3
"""Delaunay mesh of the disk of radius 1 with a circular hole of radius 0.1
centred at (0.5, 0), graded towards the hole.

Writes the ensflow mesh format (nodes / triangles / boundary_edges); outer
circle edges carry tag 1, inner circle edges tag 2.

    make_offset_mesh.py OUT [--outer 80] [--inner 60] [--growth 0.1] [--seed 7]
"""

import argparse
import math

import numpy as np
from scipy.spatial import Delaunay

R_OUT = 1.0
R_IN = 0.1
CENTER = np.array([0.5, 0.0])


def circle(n, radius, center):
    theta = 2.0 * np.pi * np.arange(n) / n
    return center + radius * np.column_stack([np.cos(theta), np.sin(theta)])


def inner_distance(p):
    return np.linalg.norm(p - CENTER, axis=1) - R_IN


def size_field(p, h_in, h_out, growth):
    return np.minimum(h_out, h_in + growth * np.maximum(inner_distance(p), 0.0))


def inside(p, margin):
    r = np.linalg.norm(p, axis=1)
    return (r < R_OUT - margin) & (inner_distance(p) > margin)


def interior_points(h_in, h_out, growth, rng):
    """Greedy Poisson-disk sampling against the size field."""
    candidates = rng.uniform(-R_OUT, R_OUT, size=(400000, 2))
    candidates = candidates[inside(candidates, 0.0)]
    h = size_field(candidates, h_in, h_out, growth)
    order = np.argsort(h)
    candidates, h = candidates[order], h[order]
    # Keep a margin from both circles so boundary edges stay intact.
    keep = inside(candidates, 0.0) & (np.linalg.norm(candidates, axis=1) < R_OUT - 0.6 * h)
    keep &= inner_distance(candidates) > 0.6 * h
    candidates, h = candidates[keep], h[keep]

    accepted = []
    cell = h_in
    grid = {}
    for p, hp in zip(candidates, h):
        key = (int(p[0] // cell), int(p[1] // cell))
        reach = int(math.ceil(hp / cell))
        ok = True
        for i in range(key[0] - reach, key[0] + reach + 1):
            for j in range(key[1] - reach, key[1] + reach + 1):
                for q, hq in grid.get((i, j), ()):
                    if (p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2 < (0.8 * min(hp, hq)) ** 2:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            accepted.append(p)
            grid.setdefault(key, []).append((p, hp))
    return np.array(accepted)


def smooth(points, fixed, iterations=20):
    """Laplacian smoothing of the free points over the current triangulation."""
    for _ in range(iterations):
        tri = valid_triangles(points)
        neighbours = [[] for _ in range(len(points))]
        for a, b, c in tri:
            neighbours[a] += [b, c]
            neighbours[b] += [a, c]
            neighbours[c] += [a, b]
        moved = points.copy()
        for i in range(fixed, len(points)):
            if neighbours[i]:
                moved[i] = points[list(set(neighbours[i]))].mean(axis=0)
        ok = inside(moved[fixed:], 0.0)
        points[fixed:][ok] = moved[fixed:][ok]
    return points


def valid_triangles(points):
    tri = Delaunay(points).simplices
    centroid = points[tri].mean(axis=1)
    keep = inside(centroid, 0.0)
    return tri[keep]


def orient(points, tri):
    a, b, c = points[tri[:, 0]], points[tri[:, 1]], points[tri[:, 2]]
    area = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    tri = tri.copy()
    flip = area < 0
    tri[flip] = tri[flip][:, [0, 2, 1]]
    return tri


def boundary_edges(tri, n_outer, n_inner):
    count = {}
    for t in tri:
        for k in range(3):
            e = tuple(sorted((t[k], t[(k + 1) % 3])))
            count[e] = count.get(e, 0) + 1
    edges = [e for e, c in count.items() if c == 1]
    tagged = []
    for a, b in edges:
        if a < n_outer and b < n_outer:
            tagged.append((a, b, 1))
        elif n_outer <= a < n_outer + n_inner and n_outer <= b < n_outer + n_inner:
            tagged.append((a, b, 2))
        else:
            raise RuntimeError(f"boundary edge ({a}, {b}) joins an interior node")
    if len(tagged) != n_outer + n_inner:
        raise RuntimeError(f"expected {n_outer + n_inner} boundary edges, found {len(tagged)}")
    return sorted(tagged)


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("out")
    parser.add_argument("--outer", type=int, default=80)
    parser.add_argument("--inner", type=int, default=60)
    parser.add_argument("--growth", type=float, default=0.1)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    h_out = 2.0 * np.pi * R_OUT / args.outer
    h_in = 2.0 * np.pi * R_IN / args.inner
    rng = np.random.default_rng(args.seed)
    boundary = np.vstack([circle(args.outer, R_OUT, np.zeros(2)), circle(args.inner, R_IN, CENTER)])
    points = np.vstack([boundary, interior_points(h_in, h_out, args.growth, rng)])
    points = smooth(points, len(boundary))
    tri = orient(points, valid_triangles(points))
    edges = boundary_edges(tri, args.outer, args.inner)

    with open(args.out, "w") as f:
        f.write(f"# offset cylinders: outer r=1, inner r=0.1 at (0.5, 0); "
                f"{args.outer} outer / {args.inner} inner boundary points, growth {args.growth}\n")
        f.write(f"nodes {len(points)}\n")
        for x, y in points:
            f.write(f"{float(x)!r} {float(y)!r}\n")
        f.write(f"triangles {len(tri)}\n")
        for a, b, c in tri:
            f.write(f"{a} {b} {c}\n")
        f.write(f"boundary_edges {len(edges)}\n")
        for a, b, tag in edges:
            f.write(f"{a} {b} {tag}\n")
    n_edges = len(points) + len(tri)  # V - E + F = 0 on an annulus
    print(f"{len(points)} nodes, {len(tri)} triangles, "
          f"{2 * (len(points) + n_edges) + len(points)} Taylor-Hood dofs")


if __name__ == "__main__":
    main()
