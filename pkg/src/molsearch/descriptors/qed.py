"""Drug-likeness score: weighted geometric mean of desirability curves.

Eight properties (weight, logP, acceptors, donors, polar surface area,
rotatable bonds, aromatic rings, structural alerts) each pass through an
asymmetric double sigmoid normalized by its precomputed maximum; the final
score is the weighted geometric mean of the eight desirabilities.
"""
from __future__ import annotations

import math
from functools import lru_cache

from ..molgraph.match import has_match
from ..molgraph.mol import Molecule
from ..molgraph.pattern import parse_pattern
from .basic import (
    aromatic_ring_count,
    hbd_count,
    molecular_weight,
    rotatable_bonds,
)
from .crippen import crippen_logp
from .tables import load_table
from .tpsa import tpsa

__all__ = ["qed", "qed_properties", "alert_count", "acceptor_count", "ads"]

_PROPERTIES = ("MW", "ALOGP", "HBA", "HBD", "PSA", "ROTB", "AROM", "ALERTS")


@lru_cache(maxsize=1)
def _params() -> dict[str, dict[str, float]]:
    table = load_table("qed_parameters.tsv").as_dict()
    out: dict[str, dict[str, float]] = {}
    for prop in _PROPERTIES:
        out[prop] = {
            key: table[f"{prop}.{key}"]
            for key in ("a", "b", "c", "d", "e", "f", "dmax", "weight")
        }
    return out


@lru_cache(maxsize=1)
def _alert_patterns():
    table = load_table("qed_alerts.tsv")
    return tuple((tid, parse_pattern(pat)) for tid, pat in table.patterns())


def alert_count(mol: Molecule) -> float:
    """Number of alert patterns with at least one match."""
    return float(sum(1 for _, p in _alert_patterns() if has_match(mol, p)))


def acceptor_count(mol: Molecule) -> float:
    """Acceptor tally used by the score, stricter than the registry's
    hba_count: every neutral-or-anionic O counts, but N only as pyridine-type
    aromatic N (two ring neighbors, no H), nitrile N, or an amine with three
    single bonds that is not an amide/sulfonamide nitrogen."""
    count = 0
    for idx, atom in enumerate(mol.atoms):
        if atom.element == "O":
            if atom.charge <= 0:
                count += 1
            continue
        if atom.element != "N" or atom.charge != 0:
            continue
        if atom.aromatic:
            if mol.degree(idx) == 2 and atom.h_count == 0:
                count += 1
            continue
        orders = [mol.bonds[bi].order for _, bi in mol.neighbors(idx)]
        if orders == [3]:
            count += 1
            continue
        if any(o != 1 for o in orders):
            continue
        amide_like = False
        for n, _ in mol.neighbors(idx):
            if mol.atoms[n].element in ("C", "S") and not mol.atoms[n].aromatic:
                partner_doubles = [
                    m
                    for m, bj in mol.neighbors(n)
                    if mol.bonds[bj].order == 2 and not mol.bonds[bj].aromatic
                ]
                if any(mol.atoms[m].element == "O" for m in partner_doubles):
                    amide_like = True
                    break
        if not amide_like:
            count += 1
    return float(count)


def ads(x: float, p: dict[str, float]) -> float:
    """Asymmetric double sigmoid, normalized to [0, 1] by its maximum."""
    rise = 1.0 + math.exp(-(x - p["c"] + p["d"] / 2.0) / p["e"])
    fall = 1.0 + math.exp(-(x - p["c"] - p["d"] / 2.0) / p["f"])
    raw = p["a"] + p["b"] / rise * (1.0 - 1.0 / fall)
    return raw / p["dmax"]


def qed_properties(mol: Molecule) -> dict[str, float]:
    """The eight raw property values feeding the score."""
    return {
        "MW": molecular_weight(mol),
        "ALOGP": crippen_logp(mol),
        "HBA": acceptor_count(mol),
        "HBD": hbd_count(mol),
        "PSA": tpsa(mol),
        "ROTB": rotatable_bonds(mol),
        "AROM": aromatic_ring_count(mol),
        "ALERTS": alert_count(mol),
    }


def qed(mol: Molecule) -> float:
    """Weighted geometric mean of the eight desirabilities, in (0, 1)."""
    params = _params()
    values = qed_properties(mol)
    log_sum = 0.0
    weight_sum = 0.0
    for prop in _PROPERTIES:
        p = params[prop]
        d = max(ads(values[prop], p), 1e-12)
        log_sum += p["weight"] * math.log(d)
        weight_sum += p["weight"]
    return math.exp(log_sum / weight_sum)
