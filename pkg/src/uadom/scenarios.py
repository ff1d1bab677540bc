"""Bundled worked examples, each producing a deterministic JSON-ready report.

Reports are compared with the golden files in ``uadom/data/goldens``; the
goldens are only rewritten on explicit request.
"""

from __future__ import annotations

import itertools
import json
from importlib import resources
from pathlib import Path
from typing import Callable

from uadom.errors import DEFAULT_BUDGET, Budget


def data_path(name: str) -> Path:
    return Path(str(resources.files("uadom") / "data" / name))


def golden_dir() -> Path:
    return data_path("goldens")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def wordex(budget: Budget = DEFAULT_BUDGET) -> dict:
    """Class-2 nilpotent commutator array in the Heisenberg group of order 27."""
    from uadom.algebra import check_identity, generate_subalgebra
    from uadom.arrays import certify, commutator_array, validate_array, verify_certificate
    from uadom.library import (
        NILPOTENT2,
        commutator,
        commutator_power_identity,
        heisenberg,
        heisenberg_element,
        power,
        symmetric_group3,
        x,
        y,
    )
    from uadom.terms import evaluate

    H, S3 = heisenberg(3), symmetric_group3()
    arr = commutator_array(3)
    gx, gy = heisenberg_element(1, 0, 0), heisenberg_element(0, 1, 0)
    cube = lambda g: evaluate(power(x, 3), H, {"x": g})  # noqa: E731
    center = [heisenberg_element(0, 0, c) for c in range(3)]
    B = generate_subalgebra(H, [cube(gx), cube(gy), *center])
    cert = certify(arr, H, B, {"x1_1": gx, "x2_1": gy})
    verdict = verify_certificate(cert, [H], budget=budget)
    target = evaluate(power(commutator(x, y), 3), H, {"x": gx, "y": gy})
    return {
        "nilpotent_identity_holds": check_identity(H, NILPOTENT2, budget) is None,
        "commutator_power_identity_holds": check_identity(H, commutator_power_identity(3), budget) is None,
        "array_in_heisenberg": validate_array(arr, [H], budget).to_dict(),
        "array_in_s3": validate_array(arr, [S3], budget).to_dict(),
        "B": sorted(B.members),
        "certificate": cert.to_dict(),
        "certified_equals_commutator_cubed": cert.value == target,
        "verification": verdict.to_dict(),
    }


def zigzag(budget: Budget = DEFAULT_BUDGET) -> dict:
    """Search for the smallest zigzag configuration and certify it three ways."""
    from uadom.algebra import dominion_upper
    from uadom.arrays import certify_shared, verify_certificate, zigzag_array
    from uadom.coproduct import build_presentation, prove_equal
    from uadom.formats import load_algebra
    from uadom.library import SEMIGROUP_IDS
    from uadom.terms import Gen
    from uadom.zigzag import find_zigzag_instance

    inst = find_zigzag_instance(6, budget)
    fixture = load_algebra(data_path("zigzag.alg"))
    cert = certify_shared(zigzag_array(), inst.A, inst.B, [inst.x], [inst.z], [inst.y], budget=budget)
    p = build_presentation(inst.A, inst.B, SEMIGROUP_IDS, depth=2, saturate=False, budget=budget)
    proof = prove_equal(p, Gen("L", inst.d), Gen("R", inst.d))
    bound = dominion_upper(inst.A, inst.B, SEMIGROUP_IDS, 3, budget=budget)
    return {
        "instance": inst.to_dict(),
        "matches_fixture": fixture.algebra == inst.A and fixture.B == inst.B,
        "certificate": cert.to_dict(),
        "verification": verify_certificate(cert, max_c=3, ids=SEMIGROUP_IDS, budget=budget).to_dict(),
        "coproduct": {"verdict": proof.verdict.value, "rounds_used": p.rounds_done},
        "dominion_upper_max_c_3": sorted(bound.members),
        "xyz_in_dominion_upper": inst.d in bound,
    }


def example47(budget: Budget = DEFAULT_BUDGET) -> dict:
    """A pre-transfer system on five points that is not a transfer system."""
    from uadom.formats import parse_collection
    from uadom.tsys import (
        GroundSet,
        SubsetCollection,
        check_pre_transfer,
        extract_chain,
        is_transfer_system,
        least_closure,
    )

    g = GroundSet(tuple("abcde"))
    c = SubsetCollection(g, frozenset(parse_collection(data_path("example47.txt").read_text(), g.names)))
    p = least_closure(c)
    chain = extract_chain(c, 0, g.full)
    return {
        "pre_transfer": check_pre_transfer(c).to_dict(g),
        "empty_equivalent_to_full": p.same(0, g.full),
        "chain": [g.labels(u) for u in chain],
        "decision": is_transfer_system(c).to_dict(),
    }


def thm_witness(budget: Budget = DEFAULT_BUDGET) -> dict:
    """Every principal system with ``|V| != 1`` on up to six points, realised in the integer model."""
    from uadom.tsys import GroundSet, dominion_witness

    out = {}
    for n in range(1, 7):
        g = GroundSet.numbered(n)
        checked = agree = 0
        for V in range(g.full + 1):
            if bin(V).count("1") == 1:
                continue
            w = dominion_witness(g, V, oracle=True)
            checked += 1
            agree += w.oracle_agrees
        out[str(n)] = {"systems": checked, "oracle_agrees": agree}
    return out


def dom_equals_B(budget: Budget = DEFAULT_BUDGET) -> dict:
    """In the integer model, the mod-M map and the zero map separate exactly the non-members of B."""
    from uadom.model import EMPTY, ModelInstance, bounded_elements, model_pair_equivalent, separate

    out = {}
    for n in range(2, 6):
        for m in range(2, n + 1):
            inst = ModelInstance(n, m)
            total = in_b = separated = equalizer = mismatches = 0
            for u in bounded_elements(n, 2):
                total += 1
                member = inst.in_B(u)
                sep = separate(inst, u) is not None
                eq = model_pair_equivalent(inst, (u, EMPTY), (EMPTY, u))
                in_b += member
                separated += sep
                equalizer += eq
                mismatches += (member == sep) + (member != eq)
            out[f"n={n},m={m}"] = {
                "elements": total,
                "in_B": in_b,
                "separated": separated,
                "equalizer": equalizer,
                "mismatches": mismatches,
            }
    return out


SCENARIOS: dict[str, Callable[..., dict]] = {
    "wordex": wordex,
    "zigzag": zigzag,
    "example47": example47,
    "thm-witness": thm_witness,
    "dom-equals-B": dom_equals_B,
}


def run_scenarios(
    filter: str | None = None,
    *,
    update: bool = False,
    goldens: Path | None = None,
    budget: Budget = DEFAULT_BUDGET,
) -> dict:
    """Run the selected scenarios and diff each report against its golden file."""
    goldens = goldens or golden_dir()
    names = [n for n in SCENARIOS if filter is None or filter in n]
    if not names:
        raise ValueError(f"no scenario matches {filter!r}")
    results = {}
    for name in names:
        text = dumps(SCENARIOS[name](budget))
        path = goldens / f"{name}.json"
        if update:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
            results[name] = {"status": "updated", "golden": str(path)}
        elif not path.exists():
            results[name] = {"status": "missing-golden", "golden": str(path)}
        else:
            expected = path.read_text(encoding="utf-8")
            if expected == text:
                results[name] = {"status": "pass", "golden": str(path)}
            else:
                results[name] = {
                    "status": "diff",
                    "golden": str(path),
                    "differences": _diff(json.loads(expected), json.loads(text)),
                }
    return results


def _diff(expected, actual, path: str = "$") -> list[str]:
    if isinstance(expected, dict) and isinstance(actual, dict):
        out = []
        for key in sorted(set(expected) | set(actual)):
            sub = f"{path}.{key}"
            if key not in actual:
                out.append(f"{sub}: missing from output")
            elif key not in expected:
                out.append(f"{sub}: not in golden")
            else:
                out.extend(_diff(expected[key], actual[key], sub))
        return out
    if isinstance(expected, list) and isinstance(actual, list) and len(expected) == len(actual):
        return list(itertools.chain.from_iterable(_diff(e, a, f"{path}[{i}]") for i, (e, a) in enumerate(zip(expected, actual))))
    if expected != actual:
        return [f"{path}: expected {json.dumps(expected)}, got {json.dumps(actual)}"]
    return []
