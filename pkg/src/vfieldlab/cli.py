"""Command-line front end.

Exit codes: 0 success, 1 failed verification, 2 input error, 3 numerical
failure (blowup, missing event, non-transversal orbit, ...).
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from . import claims, cycles, flow, linops, symplectic
from .exprio import ParseError, field_json, float_text, format_poly, parse_field, parse_poly, rat_text, report
from .polyalg import OddExponent, VectorField2, divergence, lie_bracket, scale_field
from .presets import preset, preset_names

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


class InputError(ValueError):
    pass


# -- argument plumbing ---------------------------------------------------------------

def _field_args(p: argparse.ArgumentParser, second: bool = False, perturbation: bool = False):
    p.add_argument("--x", nargs=2, metavar=("P", "Q"), help="field components x' = P, y' = Q")
    p.add_argument("--preset", help=f"named field instead of --x ({', '.join(preset_names())})")
    if second:
        p.add_argument("--y", nargs=2, metavar=("R", "S"), help="second field components")
        p.add_argument("--y-preset", help="named second field")
    if perturbation:
        p.add_argument("--e", nargs=2, metavar=("P", "Q"), required=True, help="perturbation direction")
        p.add_argument("--eps", default="0", help="perturbation size as an exact rational, e.g. 1/10")


def _degree_arg(p, default=linops.DEFAULT_DEGREE):
    p.add_argument("-N", type=int, default=default, help=f"degree bound (<= {linops.MAX_DEGREE})")


def _numeric_args(p):
    p.add_argument("--rtol", type=float, default=flow.DEFAULT_CONFIG.rtol)
    p.add_argument("--atol", type=float, default=flow.DEFAULT_CONFIG.atol)
    p.add_argument("--alpha", type=float, default=0.0, help="section angle of the ray")


def _scan_args(p):
    p.add_argument("--rmin", type=float, default=0.2)
    p.add_argument("--rmax", type=float, default=2.0)
    p.add_argument("--workers", type=int, default=None, help="processes for the radial scan")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vfieldlab", description=__doc__.splitlines()[0])
    parser.add_argument("--json", action="store_true", help="emit a JSON report")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bracket", help="Lie bracket [X, Y]")
    _field_args(p, second=True)
    p = sub.add_parser("divergence", help="divergence of X")
    _field_args(p)
    p = sub.add_parser("scale", help="rescaled field fX")
    _field_args(p)
    p.add_argument("--f", required=True, help="scalar polynomial f")
    p = sub.add_parser("centralizer", help="degree-truncated centralizer C_N(X)")
    _field_args(p)
    _degree_arg(p)
    p.add_argument("--no-structure", action="store_true", help="skip structure constants")
    p = sub.add_parser("compare-centralizers", help="C_N(X) against C_N(fX)")
    _field_args(p)
    _degree_arg(p)
    p.add_argument("--f", required=True)
    p = sub.add_parser("dimension-profile", help="dim C_N(X) for N = 1..N")
    _field_args(p)
    _degree_arg(p, 5)
    p = sub.add_parser("first-integrals", help="polynomial first integrals of degree <= N")
    _field_args(p)
    _degree_arg(p, 4)
    p = sub.add_parser("corank", help="rank and corank of g -> X.grad g")
    _field_args(p)
    _degree_arg(p, 2)
    p = sub.add_parser("poisson-check", help="lifted Hamiltonians and their Poisson bracket")
    _field_args(p, second=True)
    p = sub.add_parser("polar", help="polar form dr/dtheta")
    _field_args(p)
    p = sub.add_parser("return-map", help="first return radius on a ray")
    _field_args(p)
    _numeric_args(p)
    p.add_argument("--r0", type=float, required=True)
    p = sub.add_parser("cycles", help="scan for limit cycles")
    _field_args(p)
    _numeric_args(p)
    _scan_args(p)
    p = sub.add_parser("multiplier", help="characteristic multiplier of the cycle through r0")
    _field_args(p)
    _numeric_args(p)
    p.add_argument("--r0", type=float, required=True, help="cycle radius on the section ray")
    p = sub.add_parser("invariance", help="tangency defect of Y along the cycles of X")
    _field_args(p, second=True)
    _numeric_args(p)
    _scan_args(p)
    p = sub.add_parser("probe-perturbation", help="centralizer of X + eps E")
    _field_args(p, perturbation=True)
    _degree_arg(p)
    p = sub.add_parser("verify-paper-examples", help="reproduce the worked examples")
    p.add_argument("--exact-only", action="store_true", help="skip the numerical cycle checks")
    return parser


def _field(ns, comps_attr: str, preset_attr: str, label: str) -> VectorField2:
    comps = getattr(ns, comps_attr, None)
    name = getattr(ns, preset_attr, None)
    if comps and name:
        raise InputError(f"give either --{comps_attr} or the preset for {label}, not both")
    if name:
        try:
            return preset(name)
        except (KeyError, OddExponent) as err:
            raise InputError(str(err.args[0] if err.args else err)) from err
    if not comps:
        raise InputError(f"missing field {label}: use --{comps_attr} P Q or a preset")
    return parse_field(*comps)


def _fx(ns) -> VectorField2:
    return _field(ns, "x", "preset", "X")


def _fy(ns) -> VectorField2:
    return _field(ns, "y", "y_preset", "Y")


def _cfg(ns) -> flow.IntegratorConfig:
    return flow.IntegratorConfig(rtol=ns.rtol, atol=ns.atol)


_RAT = re.compile(r"\s*[-+]?\d+(\s*/\s*\d+)?\s*$")


def _rat(text: str) -> Fraction:
    """Integer or p/q literal; decimals are refused like everywhere else in the input grammar."""
    if not _RAT.match(text):
        raise InputError(f"not an exact rational (use p/q): {text!r}")
    try:
        return Fraction(text.replace(" ", ""))
    except ZeroDivisionError as err:
        raise InputError(f"zero denominator in {text!r}") from err


# -- payload builders ----------------------------------------------------------------

def _centralizer_json(rep: linops.CentralizerReport) -> Dict[str, Any]:
    out: Dict[str, Any] = {
        "N": rep.N,
        "dimension": rep.dimension,
        "basis": [field_json(B) for B in rep.basis],
        "abelian": rep.abelian,
        "closed_within_degree": rep.closed_within_degree,
    }
    if rep.structure_constants is not None:
        out["structure_constants"] = [[[rat_text(c) for c in row] for row in plane] for plane in rep.structure_constants]
        out["structure_basis"] = [field_json(B) for B in rep.structure_basis]
    return out


def _cycle_json(c: cycles.CycleInfo) -> Dict[str, Any]:
    return {
        "section_angle": float_text(c.section_angle),
        "radius": float_text(c.radius),
        "period": float_text(c.period),
        "multiplier": float_text(c.multiplier),
        "stability": c.stability,
        "residual": float_text(c.residual),
        "samples": [[float_text(x), float_text(y)] for x, y in c.samples],
    }


def _trig_json(terms: Dict[int, cycles.TrigPoly]) -> Dict[str, Any]:
    return {
        str(k): [[h, rat_text(c), rat_text(s)] for h, c, s in T.coeffs]
        for k, T in sorted(terms.items())
    }


def _check_positive_range(ns):
    if not 0 < ns.rmin < ns.rmax:
        raise InputError("need 0 < --rmin < --rmax")


def execute(ns) -> Dict[str, Any]:
    """Run one parsed invocation; returns the report document."""
    cmd = ns.command
    inputs: Dict[str, Any] = {}
    result: Dict[str, Any] = {}
    if cmd == "verify-paper-examples":
        rows = claims.run_checks(numeric=not ns.exact_only)
        result = {
            "checks": [{"claim": r.claim, "location": r.location, "computed": r.computed, "passed": r.passed}
                       for r in rows],
            "all_passed": all(r.passed for r in rows),
        }
        return report(cmd, {"exact_only": ns.exact_only}, result)

    X = _fx(ns)
    inputs["X"] = field_json(X)
    if cmd == "bracket":
        Y = _fy(ns)
        inputs["Y"] = field_json(Y)
        B = lie_bracket(X, Y)
        result = {"bracket": field_json(B), "zero": B.is_zero()}
    elif cmd == "divergence":
        result = {"divergence": format_poly(divergence(X))}
    elif cmd == "scale":
        f = parse_poly(ns.f)
        inputs["f"] = format_poly(f)
        result = {"field": field_json(scale_field(f, X))}
    elif cmd == "centralizer":
        inputs["N"] = ns.N
        result = _centralizer_json(linops.centralizer_basis(X, ns.N, structure=not ns.no_structure))
    elif cmd == "compare-centralizers":
        f = parse_poly(ns.f)
        inputs.update(f=format_poly(f), N=ns.N)
        cmp = linops.compare_centralizers(X, f, ns.N)
        result = {
            "original": _centralizer_json(cmp.original),
            "rescaled": _centralizer_json(cmp.rescaled),
            "rescaled_field": field_json(cmp.rescaled_field),
            "dimensions_equal": cmp.dimensions_equal,
            "abelian_equal": cmp.abelian_equal,
            "necessary_conditions_hold": cmp.necessary_conditions_hold,
        }
    elif cmd == "dimension-profile":
        inputs["N_max"] = ns.N
        result = {"profile": [[n, d] for n, d in linops.dimension_profile(X, ns.N)]}
    elif cmd == "first-integrals":
        inputs["N"] = ns.N
        result = {"integrals": [format_poly(g) for g in linops.first_integrals(X, ns.N)]}
    elif cmd == "corank":
        inputs["N"] = ns.N
        rep = linops.derivative_operator_report(X, ns.N)
        result = {
            "domain_dimension": rep.domain_dimension,
            "codomain_dimension": rep.codomain_dimension,
            "rank": rep.rank,
            "corank": rep.corank,
            "kernel": [format_poly(g) for g in rep.kernel_basis],
        }
    elif cmd == "poisson-check":
        Y = _fy(ns)
        inputs["Y"] = field_json(Y)
        cert = symplectic.integrability_certificate(X, Y)
        result = {
            "H": format_poly(cert.H),
            "G": format_poly(cert.G),
            "poisson_bracket": format_poly(cert.bracket),
            "lie_bracket": field_json(lie_bracket(X, Y)),
            "remark_defect": format_poly(symplectic.remark_defect(X, Y)),
            "commuting": cert.commuting,
            "gradient_ranks": cert.gradient_ranks,
            "independent": cert.independent,
        }
    elif cmd == "polar":
        form = cycles.polar_reduce(X)
        result = {
            "numerator": _trig_json(form.numerator),
            "denominator": _trig_json(form.denominator),
            "nontransversal_angles": [float_text(a) for a in form.nontransversal_angles],
        }
    elif cmd == "return-map":
        inputs.update(r0=float_text(ns.r0), alpha=float_text(ns.alpha))
        ret = cycles.first_return(X, ns.r0, ns.alpha, _cfg(ns))
        result = {"radius": float_text(ret.radius), "time": float_text(ret.time),
                  "displacement": float_text(ret.radius - ns.r0)}
    elif cmd in ("cycles", "invariance"):
        _check_positive_range(ns)
        inputs.update(rmin=float_text(ns.rmin), rmax=float_text(ns.rmax), alpha=float_text(ns.alpha))
        scan = cycles.find_cycles(X, ns.rmin, ns.rmax, _cfg(ns), ns.alpha, workers=ns.workers)
        if cmd == "cycles":
            result = {
                "cycles": [_cycle_json(c) for c in scan.cycles],
                "center_bands": [[float_text(a), float_text(b)] for a, b in scan.center_bands],
                "grid_errors": sorted({g.error for g in scan.grid if g.error}),
                "failures": scan.failures,
            }
        else:
            Y = _fy(ns)
            inputs["Y"] = field_json(Y)
            result = {"cycles": [{"radius": float_text(c.radius),
                                  "defect": float_text(cycles.invariance_defect(Y, c))} for c in scan.cycles]}
    elif cmd == "multiplier":
        inputs.update(r0=float_text(ns.r0), alpha=float_text(ns.alpha))
        c = cycles._build_cycle(X, ns.r0, ns.alpha, _cfg(ns))
        result = {"multiplier": float_text(c.multiplier), "period": float_text(c.period),
                  "stability": c.stability, "residual": float_text(c.residual)}
    elif cmd == "probe-perturbation":
        E = parse_field(*ns.e)
        eps = _rat(ns.eps)
        inputs.update(E=field_json(E), eps=rat_text(eps), N=ns.N)
        rep = cycles.commuting_perturbation_probe(X, E, eps, ns.N)
        result = _centralizer_json(rep)
        result["perturbed_field"] = field_json(X + E * eps)
        result["nontrivial_partner"] = rep.dimension >= 2
    return report(cmd, inputs, result)


# -- rendering -----------------------------------------------------------------------

def _flatten(prefix: str, value: Any, out: List[str]):
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    elif isinstance(value, list) and value and isinstance(value[0], (dict, list)):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        if isinstance(value, bool):
            text = "true" if value else "false"
        elif value is None:
            text = "null"
        elif isinstance(value, list):
            text = "[" + ", ".join(str(v) for v in value) + "]"
        else:
            text = str(value)
        out.append(f"{prefix}: {text}")


def render_text(doc: Dict[str, Any]) -> str:
    if doc["command"] == "verify-paper-examples" and "checks" in doc["result"]:
        lines = []
        for r in doc["result"]["checks"]:
            mark = "PASS" if r["passed"] else "FAIL"
            lines.append(f"[{mark}] {r['location']}: {r['claim']} -> {r['computed']}")
        lines.append("all checks passed" if doc["result"]["all_passed"] else "SOME CHECKS FAILED")
        return "\n".join(lines)
    lines = [f"command: {doc['command']}"]
    _flatten("inputs", doc["inputs"], lines)
    _flatten("result", doc["result"], lines)
    return "\n".join(lines)


def _emit(doc, as_json: bool):
    if as_json:
        print(json.dumps(doc, indent=2))
    else:
        print(render_text(doc))


_PAIR_FLAGS = ("--x", "--y", "--e")


def _shield_components(argv: Sequence[str]) -> List[str]:
    """Let component expressions start with '-' (argparse would read them as options)."""
    out = list(argv)
    i = 0
    while i < len(out):
        if out[i] in _PAIR_FLAGS:
            for k in (i + 1, i + 2):
                if k < len(out) and out[k].startswith("-") and out[k] not in _PAIR_FLAGS:
                    out[k] = " " + out[k]
            i += 3
        else:
            i += 1
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(_shield_components(sys.argv[1:] if argv is None else argv))
    try:
        doc = execute(ns)
    except (ParseError, InputError, linops.ZeroField, OddExponent, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        if ns.json:
            _emit(report(ns.command, {}, {"error": type(err).__name__, "message": str(err)}), True)
        return EXIT_INPUT
    except flow.IntegrationError as err:
        print(f"numerical failure: {type(err).__name__}: {err}", file=sys.stderr)
        _emit(report(ns.command, {}, {"error": type(err).__name__, "message": str(err)}), ns.json)
        return EXIT_NUMERIC
    _emit(doc, ns.json)
    if ns.command == "verify-paper-examples" and not doc["result"]["all_passed"]:
        return EXIT_FAILED
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
