"""Command-line front end.

Commands:
    csm FAN FUNCTION            CSM class of a constructible function
    verify SUITE [--corpus DIR] run a verification suite over a corpus
    pushforward MORPHISM DATA   push a function or class forward
    blowup FAN CENTER           emit the star-subdivided fan and blow-down

Machine-readable output is JSON lines: zero or more check objects

    {"check": ..., "instance": ..., "pass": ..., "lhs": ..., "rhs": ...,
     "degree_lhs": ..., "degree_rhs": ...}

followed by one summary object

    {"command": ..., "inputs": {file: digest}, "checks": n,
     "failures": m, "exit_status": k}

Exit codes: 0 success, 1 verification failure, 2 parse error,
3 validation/precondition error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from . import files
from .chow import CycleClass, degree, pushforward_cycle
from .constructible import ConstructibleFunction, euler_characteristic, pushforward_function
from .corpus import Corpus
from .csm import csm_class
from .errors import ParseError, ValidationError
from .fans import star_subdivision
from .suites import Check, run_suite


def bundled_corpus_dir() -> Path:
    return Path(resources.files("toriccsm") / "data")


def load_corpus_dir(directory: Path) -> tuple[Corpus, dict[str, str]]:
    digests: dict[str, str] = {}
    fans = {}
    for path in sorted(directory.glob("*.fan.json")):
        fan = files.load_validated_fan(path)
        fans[fan.name] = fan
        digests[path.name] = files.file_digest(path)
    morphisms = {}
    for path in sorted(directory.glob("*.morphism.json")):
        morphisms[path.stem.removesuffix(".morphism")] = files.load_morphism(path)
        digests[path.name] = files.file_digest(path)
    closures = []
    for path in sorted(directory.glob("*.closure.json")):
        closures.append(files.load_closure(path))
        digests[path.name] = files.file_digest(path)
    if not fans:
        raise ValidationError(f"no *.fan.json files in corpus directory {directory}")
    return Corpus(fans, morphisms, closures), digests


def _class_lines(cls: CycleClass) -> list[str]:
    n = cls.fan.dim
    lines = []
    items = sorted(cls.coefficients.items(), key=lambda kv: (kv[0].dim, kv[0].key))
    for cone, value in items:
        lines.append(f"  dim {n - cone.dim}:  {value} * [V({cone.key or 'o'})]")
    return lines or ["  0"]


@dataclass
class RunReport:
    """Everything one command run produced: the per-instance check results
    plus input digests; the exit status is 0 exactly when all checks pass."""

    command: str
    inputs: dict[str, str]
    results: list[Check]

    @property
    def exit_status(self) -> int:
        return 0 if all(c.passed for c in self.results) else 1

    def write_json_lines(self, stream) -> None:
        for c in self.results:
            stream.write(json.dumps(c.to_json()) + "\n")
        summary = {
            "command": self.command,
            "inputs": self.inputs,
            "checks": len(self.results),
            "failures": sum(1 for c in self.results if not c.passed),
            "exit_status": self.exit_status,
        }
        stream.write(json.dumps(summary) + "\n")


def cmd_csm(args) -> int:
    fan = files.load_validated_fan(args.fan)
    phi = files.load_function(args.function)
    if phi.fan != fan:
        raise ValidationError("function file refers to a different fan")
    cls = csm_class(phi)
    total_degree = degree(cls)
    chi = euler_characteristic(phi)
    check = Check(
        check="csm-degree",
        instance=fan.name,
        passed=total_degree == chi,
        lhs=cls.to_json(),
        degree_lhs=total_degree,
        degree_rhs=chi,
    )
    inputs = {Path(p).name: files.file_digest(p) for p in (args.fan, args.function)}
    report = RunReport("csm", inputs, [check])
    if args.json:
        report.write_json_lines(sys.stdout)
    else:
        print(f"CSM class on {fan.name}:")
        print("\n".join(_class_lines(cls)))
        print(f"degree: {total_degree}")
        print(f"euler characteristic: {chi}")
    return report.exit_status


def cmd_verify(args) -> int:
    directory = Path(args.corpus) if args.corpus else bundled_corpus_dir()
    corpus, digests = load_corpus_dir(directory)
    checks = run_suite(args.suite, corpus, seed=args.seed, trials=args.trials)
    report = RunReport(f"verify {args.suite}", digests, checks)
    report.write_json_lines(sys.stdout)
    failures = sum(1 for c in checks if not c.passed)
    print(f"verify {args.suite}: {len(checks)} checks, {failures} failures",
          file=sys.stderr)
    return report.exit_status


def cmd_pushforward(args) -> int:
    m = files.load_morphism(args.morphism)
    if not m.is_compatible:
        raise ValidationError("morphism is not compatible with the fans")
    data = files.load_function_or_class(args.data)
    if data.fan != m.source:
        raise ValidationError("data file does not live on the source fan")
    if isinstance(data, ConstructibleFunction):
        result = pushforward_function(m, data)
        kind = "function"
    else:
        result = pushforward_cycle(m, data)
        kind = "class"
    if args.json:
        inputs = {Path(p).name: files.file_digest(p) for p in (args.morphism, args.data)}
        check = Check(
            check=f"pushforward-{kind}",
            instance=f"{m.source.name}->{m.target.name}",
            passed=True,
            lhs=data.to_json(),
            rhs=result.to_json(),
        )
        RunReport("pushforward", inputs, [check]).write_json_lines(sys.stdout)
    else:
        print(f"push-forward of {kind} along {m.source.name} -> {m.target.name}:")
        for key, value in result.to_json().items():
            print(f"  {key or 'o'}: {value}")
        if not result.to_json():
            print("  0")
    return 0


def cmd_blowup(args) -> int:
    fan = files.load_validated_fan(args.fan)
    center = files.parse_cone_key(args.center)
    blown, down = star_subdivision(fan, center)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    fan_file = out_dir / f"{blown.name}.fan.json"
    files.save_fan(blown, fan_file)
    target_file = out_dir / f"{fan.name}.fan.json"
    files.save_fan(fan, target_file)
    morphism_file = out_dir / f"{blown.name}.morphism.json"
    files.save_morphism(down, morphism_file, fan_file.name, target_file.name)
    if args.json:
        inputs = {Path(args.fan).name: files.file_digest(args.fan)}
        check = Check(
            check="blowup-emit",
            instance=f"{fan.name}|center={center.key}",
            passed=True,
            rhs=files.fan_to_obj(blown),
            extra={"files": [fan_file.name, target_file.name, morphism_file.name]},
        )
        RunReport("blowup", inputs, [check]).write_json_lines(sys.stdout)
    else:
        print(f"wrote {fan_file}")
        print(f"wrote {target_file}")
        print(f"wrote {morphism_file}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toriccsm",
        description="Exact CSM classes of invariant constructible functions "
                    "on smooth complete toric varieties.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("csm", help="CSM class of a constructible function")
    p.add_argument("fan")
    p.add_argument("function")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_csm)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", help="gluing | blowup | naturality | covariance | "
                                 "fibration | prochow | normalization | chow | all")
    p.add_argument("--corpus", help="directory of *.fan.json / *.morphism.json "
                                    "(default: bundled corpus)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("pushforward", help="push a function or class forward")
    p.add_argument("morphism")
    p.add_argument("data", help="function ('values') or class ('coefficients') file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_pushforward)

    p = sub.add_parser("blowup", help="star-subdivide a fan and emit the files")
    p.add_argument("fan")
    p.add_argument("center", help="comma-joined ray indices, e.g. '0,1'")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_blowup)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
