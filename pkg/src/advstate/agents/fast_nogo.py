"""Compiled NoGo search used when the examiner runs many simulations.

This mirrors :class:`~advstate.agents.mcts.PVMCTS` driven by
:class:`~advstate.agents.heuristic.HeuristicProvider` operation for operation
(same legality rules, features, float evaluation order and tie-breaks), so its
results are interchangeable with the pure-Python search. Tests compare the two
on random positions.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from advstate.game import _WHITE_TO_MOVE, _ZOBRIST, GameState, neighbor_table

_U64 = np.uint64
_ZOB = np.array([[0, z[1], z[2]] for z in _ZOBRIST], dtype=np.uint64)
_WTM = _U64(_WHITE_TO_MOVE)
_C1 = _U64(0x9E3779B97F4A7C15)
_C2 = _U64(0xC2B2AE3D27D4EB4F)
_C3 = _U64(0xFF51AFD7ED558CCD)

_TABLES: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}


def _tables(size: int):
    t = _TABLES.get(size)
    if t is None:
        n = size * size
        nbr = np.full((n, 4), -1, dtype=np.int64)
        cnt = np.zeros(n, dtype=np.int64)
        for p, qs in enumerate(neighbor_table(size)):
            cnt[p] = len(qs)
            nbr[p, : len(qs)] = qs
        dist = np.array(
            [[abs(a // size - b // size) + abs(a % size - b % size) for b in range(n)] for a in range(n)],
            dtype=np.int64,
        )
        t = _TABLES[size] = (nbr, cnt, dist)
    return t


@njit(cache=True)
def _sigmoid(x):
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


@njit(cache=True)
def _noise(h, p, seed):
    x = (h ^ (np.uint64(p + 1) * _C1) ^ (seed * _C2)) * _C3
    return float((x >> np.uint64(40)) & np.uint64(0xFFFFFF)) / float(1 << 23) - 1.0


@njit(cache=True)
def _legal_masks(board, nbr, cnt, black, white, gid, libs, mark):
    """Fill per-colour NoGo legality (no capture, no suicide) for every point."""
    n = board.shape[0]
    for p in range(n):
        gid[p] = -1
        mark[p] = -1
    g = 0
    stack = np.empty(n, dtype=np.int64)
    for p in range(n):
        v = board[p]
        if v == 0 or gid[p] >= 0:
            continue
        gid[p] = g
        top = 0
        stack[top] = p
        top += 1
        nl = 0
        while top > 0:
            top -= 1
            q = stack[top]
            for k in range(cnt[q]):
                r = nbr[q, k]
                w = board[r]
                if w == 0:
                    if mark[r] != g:
                        mark[r] = g
                        nl += 1
                elif w == v and gid[r] < 0:
                    gid[r] = g
                    stack[top] = r
                    top += 1
        libs[g] = nl
        g += 1
    for p in range(n):
        black[p] = False
        white[p] = False
        if board[p] != 0:
            continue
        has_empty = False
        b_safe = False
        w_safe = False
        b_cap = False
        w_cap = False
        for k in range(cnt[p]):
            q = nbr[p, k]
            x = board[q]
            if x == 0:
                has_empty = True
            elif x == 1:
                if libs[gid[q]] > 1:
                    b_safe = True
                else:
                    w_cap = True
            else:
                if libs[gid[q]] > 1:
                    w_safe = True
                else:
                    b_cap = True
        black[p] = (not b_cap) and (has_empty or b_safe)
        white[p] = (not w_cap) and (has_empty or w_safe)


@njit(cache=True)
def _provider(board, turn, last, h, seed, weight, amp, temperature, nbr, cnt, dist,
              black, white, gid, libs, mark, out_points, out_priors):
    """Static value and prior of the turn player; returns (value, n_legal)."""
    n = board.shape[0]
    _legal_masks(board, nbr, cnt, black, white, gid, libs, mark)
    if turn == 1:
        mine = black
        theirs = white
    else:
        mine = white
        theirs = black
    only_me = 0
    only_them = 0
    shared = 0
    for p in range(n):
        if mine[p] and theirs[p]:
            shared += 1
        elif mine[p]:
            only_me += 1
        elif theirs[p]:
            only_them += 1
    margin = only_me - only_them + (shared & 1)
    value = _sigmoid(1.5 * (margin - 0.5) / (1.0 + shared / 8.0))

    # open sides of each opponent-playable point (-1 when not playable)
    open_sides = gid  # reuse scratch space
    for q in range(n):
        if theirs[q]:
            c = 0
            for k in range(cnt[q]):
                if board[nbr[q, k]] != turn:
                    c += 1
            open_sides[q] = c
        else:
            open_sides[q] = -1
    m = 0
    top = -1e300
    for p in range(n):
        if not mine[p]:
            continue
        x = 1.0 if theirs[p] else -1.0
        for k in range(cnt[p]):
            if open_sides[nbr[p, k]] == 1:
                x += 0.8
        near = 0.0
        if last >= 0:
            d = dist[last, p]
            if d == 1:
                near = weight
            elif d == 2:
                near = 0.5 * weight
        x += near + amp * _noise(h, p, seed)
        out_points[m] = p
        out_priors[m] = x
        if x > top:
            top = x
        m += 1
    z = 0.0
    for i in range(m):
        e = math.exp((out_priors[i] - top) / temperature)
        out_priors[i] = e
        z += e
    for i in range(m):
        out_priors[i] = out_priors[i] / z
    return value, m


@njit(cache=True)
def _search(root_board, root_turn, root_last, root_hash, sims, c_puct, seed, weight, amp, temperature,
            nbr, cnt, dist, zob, wtm):
    n = root_board.shape[0]
    max_nodes = sims + 1
    node_n = np.zeros(max_nodes, dtype=np.int64)
    node_w = np.zeros(max_nodes, dtype=np.float64)
    node_first = np.zeros(max_nodes, dtype=np.int64)
    node_count = np.zeros(max_nodes, dtype=np.int64)
    node_terminal = np.zeros(max_nodes, dtype=np.bool_)
    edge_cap = max_nodes * n
    edge_point = np.zeros(edge_cap, dtype=np.int64)
    edge_prior = np.zeros(edge_cap, dtype=np.float64)
    edge_n = np.zeros(edge_cap, dtype=np.int64)
    edge_w = np.zeros(edge_cap, dtype=np.float64)
    edge_child = np.full(edge_cap, -1, dtype=np.int64)

    black = np.zeros(n, dtype=np.bool_)
    white = np.zeros(n, dtype=np.bool_)
    gid = np.zeros(n, dtype=np.int64)
    libs = np.zeros(n, dtype=np.int64)
    mark = np.zeros(n, dtype=np.int64)
    pts = np.zeros(n, dtype=np.int64)
    pri = np.zeros(n, dtype=np.float64)

    board = root_board.copy()
    value, m = _provider(board, root_turn, root_last, root_hash, seed, weight, amp, temperature,
                         nbr, cnt, dist, black, white, gid, libs, mark, pts, pri)
    n_nodes = 1
    n_edges = 0
    z = 0.0
    for i in range(m):
        z += pri[i]
    node_first[0] = 0
    node_count[0] = m
    for i in range(m):
        edge_point[i] = pts[i]
        edge_prior[i] = pri[i] / z if z > 0 else 1.0 / m
    n_edges = m
    node_n[0] = 1
    node_w[0] = value

    path_node = np.zeros(n + 2, dtype=np.int64)
    path_edge = np.zeros(n + 2, dtype=np.int64)

    for _ in range(sims - 1):
        for p in range(n):
            board[p] = root_board[p]
        turn = root_turn
        h = root_hash
        last = root_last
        node = 0
        depth = 0
        leaf = -1
        while True:
            # PUCT selection; first maximum wins
            sqrt_n = math.sqrt(node_n[node])
            fpu = node_w[node] / node_n[node] if node_n[node] else 0.5
            best = 0
            best_score = -math.inf
            f = node_first[node]
            for i in range(node_count[node]):
                e = f + i
                en = edge_n[e]
                q = edge_w[e] / en if en else fpu
                score = q + c_puct * edge_prior[e] * sqrt_n / (1 + en)
                if score > best_score:
                    best_score = score
                    best = i
            e = f + best
            path_node[depth] = node
            path_edge[depth] = e
            depth += 1
            p = edge_point[e]
            board[p] = turn
            h = h ^ zob[p, turn] ^ wtm
            turn = 3 - turn
            last = p
            child = edge_child[e]
            if child < 0:
                child = n_nodes
                n_nodes += 1
                edge_child[e] = child
                leaf = child
                # evaluate and expand the new node
                v, mm = _provider(board, turn, last, h, seed, weight, amp, temperature,
                                  nbr, cnt, dist, black, white, gid, libs, mark, pts, pri)
                if mm == 0:
                    node_terminal[child] = True
                    v = 0.0
                else:
                    zz = 0.0
                    for i in range(mm):
                        zz += pri[i]
                    node_first[child] = n_edges
                    node_count[child] = mm
                    for i in range(mm):
                        edge_point[n_edges + i] = pts[i]
                        edge_prior[n_edges + i] = pri[i] / zz if zz > 0 else 1.0 / mm
                    n_edges += mm
                break
            node = child
            if node_terminal[node]:
                leaf = node
                v = 0.0
                break
        node_n[leaf] += 1
        node_w[leaf] += v
        for k in range(depth - 1, -1, -1):
            v = 1.0 - v
            e = path_edge[k]
            pn = path_node[k]
            edge_n[e] += 1
            edge_w[e] += v
            node_n[pn] += 1
            node_w[pn] += v
    m0 = node_count[0]
    return (node_w[0], node_n[0], edge_point[:m0].copy(), edge_n[:m0].copy(), edge_w[:m0].copy())


def search_nogo(s: GameState, simulations: int, puct_constant: float, seed: int, last_move_weight: float,
                noise: float, temperature: float):
    """Run the compiled search from ``s``; returns (root w, root n, points, visits, value sums)."""
    nbr, cnt, dist = _tables(s.size)
    board = np.array(s.board, dtype=np.int64)
    last = s.last_action
    last_p = -1 if last is None or last.point is None else last.point[0] * s.size + last.point[1]
    return _search(board, int(s.turn), last_p, _U64(s.position_hash), simulations, float(puct_constant),
                   _U64(seed & 0xFFFFFFFFFFFFFFFF), float(last_move_weight), float(noise), float(temperature),
                   nbr, cnt, dist, _ZOB, _WTM)
