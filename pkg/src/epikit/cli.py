"""Command line front end.

Exit codes: 0 proved / verified / positive, 1 refuted (a counterexample is
printed), 2 unknown, 64 usage error, 65 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import fixtures
from .beth import EXPLICIT, UNKNOWN, beth_check
from .chase import ChaseError, UniverseTooLarge
from .consequence import counterexample, entails_theory
from .epi import EpiError, FiniteClass, TheoryBounded, dominion, scan_es, scan_weak_es
from .logic import LogicError, check_equivalential, filter_of, leibniz, parse_system, reduce_matrix
from .models import enumerate_models, models_up_to
from .structures import StructureError, parse_structure, render_structure
from .syntax import ParseError, SignatureError, parse_atoms, parse_implication, parse_terms, parse_theory

EXIT_OK, EXIT_REFUTED, EXIT_UNKNOWN, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 64, 65


class UsageError(Exception):
    pass


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _text(path: str) -> str:
    p = Path(path)
    if p.is_file():
        return p.read_text(encoding="utf-8")
    bundled = fixtures.data_path(p.name)
    if bundled.is_file():
        return bundled.read_text(encoding="utf-8")
    raise UsageError(f"no such file: {path}")


def _theory(path: str):
    return parse_theory(_text(path))


def _structure(path: str, signature=None):
    return parse_structure(_text(path), signature)


def _model_dir(path: str, signature) -> list:
    d = Path(path)
    if not d.is_dir():
        raise UsageError(f"not a directory: {path}")
    return [parse_structure(f.read_text(encoding="utf-8"), signature) for f in sorted(d.glob("*.fs"))]


def _elements(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad element list {text!r}") from None


def _names(text: str) -> list[str]:
    return [x.strip() for x in text.replace(",", " ").split() if x.strip()]


class _Out:
    def __init__(self, as_json: bool):
        self.as_json = as_json
        self.lines: list[str] = []

    def say(self, line: str = "") -> None:
        self.lines.append(line)

    def finish(self, payload: dict) -> None:
        if self.as_json:
            print(json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False))
        else:
            print("\n".join(self.lines))


# -- subcommands ------------------------------------------------------------------


def cmd_entail(a, out: _Out) -> int:
    T = _theory(a.theory)
    q = parse_implication(a.query, T.signature)
    prem, concl = list(q.premises), q.conclusion
    payload = {"command": "entail", "query": str(q)}
    if a.models:
        K = _model_dir(a.models, T.signature)
        ce = counterexample(K, prem, concl)
        if ce is None:
            out.say(f"PROVED over {len(K)} structures")
            payload.update(verdict="proved", structures=len(K))
            out.finish(payload)
            return EXIT_OK
        out.say("REFUTED")
        out.say(f"counterexample: {ce.render()}")
        out.say(render_structure(ce.structure).rstrip())
        payload.update(verdict="refuted", counterexample=_ce_json(ce))
        out.finish(payload)
        return EXIT_REFUTED
    cert = entails_theory(T, prem, concl, a.fuel, a.depth, deepen=a.deepen)
    if cert is not None:
        out.say(f"PROVED ({len(cert)} steps)")
        out.say(cert.render())
        payload.update(verdict="proved", certificate=cert.to_json())
        out.finish(payload)
        return EXIT_OK
    ce = counterexample(models_up_to(T, a.refute_size), prem, concl) if a.refute_size > 0 else None
    if ce is not None:
        out.say("REFUTED")
        out.say(f"counterexample: {ce.render()}")
        out.say(render_structure(ce.structure).rstrip())
        payload.update(verdict="refuted", counterexample=_ce_json(ce))
        out.finish(payload)
        return EXIT_REFUTED
    out.say(f"UNKNOWN (depth {a.depth}, fuel {a.fuel}, no counter-model up to size {a.refute_size})")
    payload.update(verdict="unknown")
    out.finish(payload)
    return EXIT_UNKNOWN


def _ce_json(ce) -> dict:
    return {
        "structure": render_structure(ce.structure),
        "size": ce.structure.size,
        "assignment": dict(sorted(ce.assignment.items())),
    }


def _semantics(a, T):
    if getattr(a, "models", None):
        return FiniteClass(_model_dir(a.models, T.signature))
    return TheoryBounded(T, a.depth, a.fuel, a.refute_size)


def _report_lines(out: _Out, rep) -> None:
    out.say(f"base: {list(rep.base)}")
    out.say(f"dominion: {list(rep.members)}")
    for b in rep.members:
        ev = rep.evidence.get(b)
        if ev is None or b in rep.base:
            continue
        if isinstance(ev, str):
            out.say(f"  {b}: {ev}")
        else:
            out.say(f"  {b}: certificate with {len(ev)} steps")
            for line in ev.render().splitlines():
                out.say(f"    {line}")
    for b, pair in sorted(rep.excluded.items()):
        out.say(f"  {b} excluded: f={list(pair.f)} g={list(pair.g)} into a structure of size {pair.target.size}")
    if rep.unknown:
        out.say(f"unknown: {list(rep.unknown)}")


def cmd_dominion(a, out: _Out) -> int:
    T = _theory(a.theory)
    B = _structure(a.structure, T.signature)
    rep = dominion(B, _elements(a.sub), _semantics(a, T))
    _report_lines(out, rep)
    out.finish({"command": "dominion", "report": rep.to_json()})
    return EXIT_UNKNOWN if rep.unknown else EXIT_OK


def cmd_epic(a, out: _Out) -> int:
    T = _theory(a.theory)
    B = _structure(a.structure, T.signature)
    rep = dominion(B, _elements(a.sub), _semantics(a, T))
    _report_lines(out, rep)
    if rep.is_total:
        verdict, code = "epic", EXIT_OK
    elif rep.excluded:
        verdict, code = "not epic", EXIT_REFUTED
    else:
        verdict, code = "unknown", EXIT_UNKNOWN
    out.say(verdict.upper())
    out.finish({"command": "epic", "verdict": verdict, "report": rep.to_json()})
    return code


def _scan_lines(out: _Out, entries) -> None:
    if not entries:
        out.say("no proper epic subuniverses found")
    for e in entries:
        out.say(f"structure of size {e.structure.size}, base {list(e.base)}, generated with {list(e.extra)}")
        for line in render_structure(e.structure).splitlines():
            out.say(f"  {line}")


def cmd_scan_es(a, out: _Out) -> int:
    T = _theory(a.theory)
    entries = scan_es(T, a.max_size, TheoryBounded(T, a.depth, a.fuel), workers=a.workers)
    _scan_lines(out, entries)
    out.finish({"command": "scan-es", "pairs": [e.to_json() for e in entries]})
    return EXIT_OK


def cmd_weak_es(a, out: _Out) -> int:
    T = _theory(a.theory)
    entries = scan_weak_es(T, a.max_size, TheoryBounded(T, a.depth, a.fuel), max_extra=a.max_extra, workers=a.workers)
    _scan_lines(out, entries)
    out.finish({"command": "weak-es", "pairs": [e.to_json() for e in entries]})
    return EXIT_OK


def cmd_beth(a, out: _Out) -> int:
    T = _theory(a.theory)
    gamma = parse_atoms(_text(a.gamma), T.signature)
    rep = beth_check(T, gamma, _names(a.xvars), _names(a.zvars), a.depth, a.fuel, a.term_depth, a.model_size)
    out.say(rep.verdict)
    for z, t in sorted(rep.definitions.items()):
        out.say(f"  {z} = {t}")
        for line in rep.certificates[z].render().splitlines():
            out.say(f"    {line}")
    if rep.implicit is not None:
        out.say(f"implicit test: {'closed' if rep.implicit else 'open'}")
    for z, rs in sorted(rep.refuted.items()):
        if rs and z not in rep.definitions:
            out.say(f"  refuted candidates for {z}: " + ", ".join(str(t) for t, _ in rs))
    if rep.separation is not None:
        out.say(f"separating solutions: {rep.separation.render()}")
    for note in rep.notes:
        out.say(f"note: {note}")
    out.finish({"command": "beth", "report": rep.to_json()})
    if rep.verdict == EXPLICIT:
        return EXIT_OK
    return EXIT_UNKNOWN if rep.verdict == UNKNOWN else EXIT_REFUTED


def cmd_leibniz(a, out: _Out) -> int:
    M = _structure(a.matrix)
    theta = leibniz(M)
    out.say(f"filter: {sorted(filter_of(M))}")
    out.say("classes: " + " ".join("{" + ",".join(map(str, c)) + "}" for c in theta.classes()))
    out.say("reduced" if theta.is_identity else "not reduced")
    out.finish({"command": "leibniz", "classes": theta.classes(), "reduced": theta.is_identity})
    return EXIT_OK


def cmd_reduce(a, out: _Out) -> int:
    M = _structure(a.matrix)
    R, proj = reduce_matrix(M)
    out.say(f"projection: {proj}")
    out.say(render_structure(R).rstrip())
    out.finish({"command": "reduce", "projection": proj, "matrix": render_structure(R)})
    return EXIT_OK


def cmd_check_equiv(a, out: _Out) -> int:
    S = parse_system(_text(a.system))
    delta = parse_terms(_text(a.delta), S.signature)
    rep = check_equivalential(S, delta, a.fuel, a.depth, a.model_size)
    for c in rep.conditions:
        line = f"{c.name}: {c.status}"
        if c.countermodel is not None:
            line += f" ({c.failed_goal} fails in {c.countermodel.render()})"
        elif c.derivations:
            line += " (" + ", ".join(f"{d.goal} in {len(d.lines)} lines" for d in c.derivations) + ")"
        out.say(line)
    if rep.verdict == "verified":
        out.say("VERIFIED")
    elif rep.verdict == "failed":
        out.say(f"FAILED AT {rep.failed_at}")
    else:
        out.say(f"UNKNOWN AT {rep.failed_at}")
    out.finish({"command": "check-equiv", "report": rep.to_json()})
    return {"verified": EXIT_OK, "failed": EXIT_REFUTED}.get(rep.verdict, EXIT_UNKNOWN)


def cmd_enumerate(a, out: _Out) -> int:
    T = _theory(a.theory)
    sizes = range(a.min_size, a.size + 1) if a.min_size else [a.size]
    found = []
    for n in sizes:
        for M in enumerate_models(T, n):
            found.append(M)
            out.say(render_structure(M).rstrip())
    out.say(f"{len(found)} models")
    out.finish({"command": "enumerate", "models": [render_structure(M) for M in found]})
    return EXIT_OK


# -- argument parsing --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _ArgParser(prog="epikit", description="Atomic consequence, dominions and definability at desk scale.")
    sub = p.add_subparsers(dest="command", parser_class=_ArgParser)

    def common(sp, chase=True, refute=True):
        sp.add_argument("--json", action="store_true", help="emit a JSON report")
        if chase:
            sp.add_argument("--depth", type=int, default=2, help="term depth of the chase universe")
            sp.add_argument("--fuel", type=int, default=10000, help="maximum rule firings")
        if refute:
            sp.add_argument("--refute-size", type=int, default=4, help="largest model tried for refutation")

    sp = sub.add_parser("entail", help="decide an implication over a theory")
    sp.add_argument("--theory", required=True)
    sp.add_argument("--query", required=True, help='"CONCL <= P1, P2"')
    sp.add_argument("--models", help="directory of .fs structures: decide over exactly these")
    sp.add_argument("--deepen", action="store_true", help="try depths 0..--depth in turn")
    common(sp)
    sp.set_defaults(run=cmd_entail)

    for name, fn in (("dominion", cmd_dominion), ("epic", cmd_epic)):
        sp = sub.add_parser(name, help=f"{name} of a subuniverse")
        sp.add_argument("--theory", required=True)
        sp.add_argument("--structure", required=True)
        sp.add_argument("--sub", required=True, help="comma-separated elements of the subuniverse")
        sp.add_argument("--models", help="directory of .fs structures forming the class")
        common(sp, refute=False)
        sp.add_argument("--refute-size", type=int, default=0, help="search separating homomorphisms up to this size")
        sp.set_defaults(run=fn)

    for name, fn in (("scan-es", cmd_scan_es), ("weak-es", cmd_weak_es)):
        sp = sub.add_parser(name, help="search small models for proper epic subuniverses")
        sp.add_argument("--theory", required=True)
        sp.add_argument("--max-size", type=int, default=4)
        sp.add_argument("--workers", type=int, default=1)
        if name == "weak-es":
            sp.add_argument("--max-extra", type=int, default=1, help="size of the extra generating set")
        common(sp, refute=False)
        sp.set_defaults(run=fn)

    sp = sub.add_parser("beth", help="implicit versus explicit definability")
    sp.add_argument("--theory", required=True)
    sp.add_argument("--gamma", required=True, help="file with one atom per line")
    sp.add_argument("--xvars", required=True)
    sp.add_argument("--zvars", required=True)
    sp.add_argument("--term-depth", type=int, default=3)
    sp.add_argument("--model-size", type=int, default=4)
    common(sp, refute=False)
    sp.set_defaults(run=cmd_beth)

    for name, fn in (("leibniz", cmd_leibniz), ("reduce", cmd_reduce)):
        sp = sub.add_parser(name, help=f"{name} of a finite matrix")
        sp.add_argument("--matrix", required=True)
        common(sp, chase=False, refute=False)
        sp.set_defaults(run=fn)

    sp = sub.add_parser("check-equiv", help="check a set of equivalence terms for a deductive system")
    sp.add_argument("--system", required=True)
    sp.add_argument("--delta", required=True)
    sp.add_argument("--fuel", type=int, default=50000, help="maximum generated inferences per goal")
    sp.add_argument("--depth", type=int, default=4, help="maximum formula depth")
    sp.add_argument("--model-size", type=int, default=3)
    common(sp, chase=False, refute=False)
    sp.set_defaults(run=cmd_check_equiv)

    sp = sub.add_parser("enumerate", help="list models up to isomorphism")
    sp.add_argument("--theory", required=True)
    sp.add_argument("--size", type=int, required=True)
    sp.add_argument("--min-size", type=int, default=0, help="list all sizes from here up to --size")
    common(sp, chase=False, refute=False)
    sp.set_defaults(run=cmd_enumerate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
        if not a.command:
            raise UsageError("missing subcommand")
        return a.run(a, _Out(a.json))
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, SignatureError, StructureError, LogicError, EpiError, ValueError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_DATA
    except UniverseTooLarge as e:
        print(f"unknown: {e}", file=sys.stderr)
        return EXIT_UNKNOWN
    except ChaseError as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
