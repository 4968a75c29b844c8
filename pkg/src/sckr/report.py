"""Uniform dictionaries for answer sets and CAS-models (the JSON model schema)."""
from __future__ import annotations

from collections import defaultdict

from .engine import AnswerSet, atom_key
from .model import SCKR
from .oracle import OVR_TAG, CasModel, profile
from .program import MAIN, Sym, format_atom


def _facts_view(pairs_i, pairs_r, contexts) -> dict:
    out = {c: {"concepts": defaultdict(list), "roles": defaultdict(list)} for c in contexts}
    for x, a, c in pairs_i:
        out[c]["concepts"][a].append(x)
    for x, r, y, c in pairs_r:
        out[c]["roles"][r].append([x, y])
    return {c: {"concepts": {k: sorted(v) for k, v in sorted(d["concepts"].items())},
                "roles": {k: sorted(v) for k, v in sorted(d["roles"].items())}}
            for c, d in sorted(out.items())}


def answer_set_view(k: SCKR, s: AnswerSet) -> dict:
    inst = [(a[1], a[2], a[3]) for a in s.atoms if a[0] == "instd" and a[4] == MAIN]
    trip = [(a[1], a[2], a[3], a[4]) for a in s.atoms if a[0] == "tripled" and a[5] == MAIN]
    ovr = sorted((a for a in s.atoms if a[0] == "ovr"), key=atom_key)
    return {
        "facts_by_context": _facts_view(inst, trip, k.structure.contexts),
        "overridings": [format_atom(a) for a in ovr],
        "cost": {str(lv): w for lv, w in sorted(s.cost.as_dict().items(), reverse=True) if w},
    }


def cas_model_view(k: SCKR, m: CasModel) -> dict:
    inst = [(f[1], f[2], f[3]) for f in m.facts if f[0] == "i"]
    trip = [(f[1], f[2], f[3], f[4]) for f in m.facts if f[0] == "r"]
    ovr = [("ovr", Sym(OVR_TAG[a.axiom.kind]), *a.ovr_args(), a.home, a.at) for a in m.chi]
    prof = profile(k, m.chi)
    return {
        "facts_by_context": _facts_view(inst, trip, k.structure.contexts),
        "overridings": [format_atom(a) for a in sorted(ovr, key=atom_key)],
        "cost": {str(lv + 1): n for lv, n in sorted(prof.counts, reverse=True) if n},
    }


def models_report(views: list[dict]) -> dict:
    return {"models": views, "count": len(views)}
