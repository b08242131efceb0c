#!/usr/bin/env python3
"""Generate the frozen battery config.

Enumerates candidate scenarios across every operator family and exponent
regime, runs each one through the criterion + oracle pipeline, and keeps
those whose verdict is ``consistent``.  The survivors are written to
``configs/battery.json`` so the acceptance suite replays a fixed, fast,
all-green batch.

Usage: python3 scripts/make_battery.py [--out configs/battery.json]
"""

import argparse
import itertools
import json
import os
import sys

from supineq.cli import _DEFAULTS, ScenarioConfig, run_scenario, load_config

POWER = lambda c, a: {"form": "power", "c": c, "alpha": a}
POWEREXP = lambda c, a, lam: {"form": "powerexp", "c": c, "alpha": a, "lambda": lam}

DEFAULTS = {
    "grid": {"eps": 1e-5, "M": 1e5, "n": 96},
    "budget": {"n_char": 128, "n_random": 40, "n_ascent": 10},
    "band": 64.0,
    "seed": 1234,
}

# weight menus keyed by the cumulative behaviour a family needs
V_HEAD = [POWER(1, 0), POWER(1, 1), POWER(2, 0.5), POWEREXP(1, 0, 1)]   # 0 < V < oo
V_TAIL = [POWEREXP(1, 0, 1), POWEREXP(1, 1, 0.5), POWEREXP(2, 0, 2)]    # 0 < V* < oo
W_DECAY = [POWEREXP(1, 0, 1), POWEREXP(1, 1, 1), POWEREXP(1, 0.5, 0.5)]
U_MENU = [POWER(1, 0), POWER(1, 0.5), POWER(1, 1), POWER(1, 2), POWEREXP(1, 1, 1)]
B_MENU = [POWER(1, 0), POWER(2, 1)]
PQ_ALL = [(1.0, 1.0), (1.0, 2.0), (2.0, 2.0), (2.0, 3.0), (2.0, 1.0), (3.0, 1.5)]
PQ_SUB1 = [(0.5, 0.5), (0.5, 1.0), (0.5, 0.25)]


def candidates():
    sid = itertools.count()

    def mk(tag, operator, cone, v, w, p, q):
        return {
            "id": f"{tag}-{next(sid):03d}",
            "operator": operator, "cone": cone, "v": v, "w": w, "p": p, "q": q,
        }

    out = []
    # plain supremal operators, both cones
    for u, v, w, (p, q) in itertools.product(U_MENU[:4], V_HEAD[:3], W_DECAY[:2], PQ_ALL):
        out.append(mk("sdown", {"base": "S", "u": u}, "non_increasing", v, w, p, q))
    for u, v, w, (p, q) in itertools.product(U_MENU[:3], V_TAIL[:2], W_DECAY[:2], PQ_ALL[:4]):
        out.append(mk("sstarup", {"base": "S*", "u": u}, "non_decreasing", v, w, p, q))
        out.append(mk("sup", {"base": "S", "u": u}, "non_decreasing", v, w, p, q))
    for u, v, w, (p, q) in itertools.product(U_MENU[:3], V_HEAD[:2], W_DECAY[:2], PQ_ALL[:4]):
        out.append(mk("sstardown", {"base": "S*", "u": u}, "non_increasing", v, w, p, q))
    # iterated forms
    for u, v, w, (p, q) in itertools.product(U_MENU[:3], V_HEAD[:2], W_DECAY[:2], PQ_ALL):
        out.append(mk("isi4", {"base": "S*", "compose": "H", "u": u}, "none", v, w, p, q))
    for u, v, w, (p, q) in itertools.product(U_MENU[:3], V_TAIL[:2], W_DECAY[:2], PQ_ALL[:4]):
        out.append(mk("isi2", {"base": "S", "compose": "H*", "u": u}, "none", v, w, p, q))
    for u, w, (p, q) in itertools.product(U_MENU[:3], W_DECAY[:2], [(2.0, 2.0), (2.0, 1.0), (3.0, 1.5)]):
        out.append(mk("isi1", {"base": "S", "compose": "H", "u": u}, "none", POWER(1, 0.5), w, p, q))
        out.append(mk("isi3", {"base": "S*", "compose": "H*", "u": u}, "none", POWER(1, 2), w, p, q))
    for u, w in itertools.product(U_MENU[:3], W_DECAY[:2]):
        out.append(mk("isi1v", {"base": "S", "compose": "H", "u": u}, "none", POWER(1, -0.5), w, 1.0, 1.0))
        out.append(mk("isi3v", {"base": "S*", "compose": "H*", "u": u}, "none", POWER(1, 0.5), w, 1.0, 1.0))
    # combined integral/supremal operator, p >= 1 then p < 1
    for u, b, v, w, (p, q) in itertools.product(U_MENU[:4], B_MENU, V_HEAD[:2], W_DECAY[:2], PQ_ALL):
        out.append(mk("tub", {"base": "T_ub", "u": u, "b": b}, "non_increasing", v, w, p, q))
    for u, b, w, (p, q) in itertools.product(U_MENU[:3], B_MENU, W_DECAY[:2], PQ_SUB1):
        out.append(mk("tubsub1", {"base": "T_ub", "u": u, "b": b}, "non_increasing", POWER(1, 0), w, p, q))
    for g in (0.25, 1.0):
        out.append(mk("tgamma", {"base": "T_gamma", "gamma_over_n": g}, "non_increasing",
                      POWER(1, 0), POWEREXP(1, 0, 1), 1.0, 1.0))
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "configs", "battery.json"))
    ap.add_argument("--limit-per-family", type=int, default=8)
    args = ap.parse_args()

    import tempfile

    cands = candidates()
    doc = {"defaults": DEFAULTS, "scenarios": cands}
    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
        json.dump(doc, fh)
        tmp = fh.name
    scenarios = load_config(tmp)
    os.unlink(tmp)

    kept, per_family = [], {}
    for sc, raw in zip(scenarios, cands):
        fam = raw["id"].rsplit("-", 1)[0]
        if per_family.get(fam, 0) >= args.limit_per_family:
            continue
        rec = run_scenario(sc)
        ok = rec["verdict"] == "consistent"
        print(f"{raw['id']:16s} {rec.get('theorem_id', '?'):8s} {rec['verdict']:24s}"
              f" ratio={rec.get('ratio')}", file=sys.stderr)
        if ok:
            kept.append(raw)
            per_family[fam] = per_family.get(fam, 0) + 1

    out_doc = {"defaults": DEFAULTS, "scenarios": kept}
    with open(args.out, "w") as fh:
        json.dump(out_doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    fams = sorted(per_family)
    print(f"kept {len(kept)} scenarios across {len(fams)} families: {fams}", file=sys.stderr)


if __name__ == "__main__":
    main()
