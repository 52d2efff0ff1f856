"""
Grassnet command line
Subcommands: generate | propagate | verify | extract | evolve | consistency | export-mesh | slice

Exit codes: 0 success, 1 failed check or degeneracy, 2 invalid configuration,
3 unreadable or malformed file.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import config
from core.errors import ConfigError, FormatError, GrassnetError, format_location
from core.grassmann import make_rng
from core.lattice import Region, format_vertex
from db.db import get_db
from engine.coefficients import check_aa, coefficient_pipeline, linear_problem_residual
from engine.darboux_net import (
    EdgeNet,
    cube_span_sweep,
    darboux_y_variables,
    edge_sweep,
    potentials_s,
    r_field_from_net,
    rotation_coeffs_darboux,
)
from engine.darboux_system import DarbouxState, evolve
from engine.qnet import consistency_report, propagate_net, sweep_squares
from engine.sampler import GeneralPositionSampler
from mesh_export import mesh_from_net, write_obj
import net_formats


COMMANDS = ('generate', 'propagate', 'verify', 'extract', 'evolve', 'consistency', 'export-mesh', 'slice')
FIELDS = ('a', 'lame', 'rotation', 'y')


@dataclass
class RunConfig:
    """Validated parameters of one CLI invocation"""

    command: str
    n: int = 3
    rank: int = 0
    dim: Optional[int] = None
    region: Optional[Region] = None
    seed: int = 1
    bound: int = 10
    input_path: Optional[str] = None
    output_path: Optional[str] = None
    report_path: Optional[str] = None
    kind: str = 'qnet'
    field_name: str = 'rotation'
    order: str = 'lexicographic'
    workers: int = 1
    axes: Tuple[int, int] = (0, 1)
    fixed: Dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.dim is None:
            self.dim = 5 * self.rank + 4 if self.command == 'consistency' else 4 * self.rank + 3

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.rank < 0:
            raise ConfigError("rank must be non-negative")
        if self.bound < 1:
            raise ConfigError("bound must be at least 1")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if self.region is not None and self.command == 'generate' and self.region.N != self.n:
            raise ConfigError(f"region {self.region} is not {self.n}-dimensional")
        if self.command == 'generate':
            if self.kind not in ('qnet', 'darboux'):
                raise ConfigError(f"unknown kind {self.kind!r}")
            if self.n < (3 if self.kind == 'darboux' else 2):
                raise ConfigError(f"lattice dimension {self.n} too small for {self.kind}")
            if self.kind == 'qnet' and self.n >= 3:
                check_propagation_bound(self.rank, self.dim)
            elif self.kind == 'qnet' and self.dim < 3 * self.rank + 2:
                raise ConfigError(f"planar squares need d >= 3r+2 = {3 * self.rank + 2}, got {self.dim}")
        if self.command == 'consistency' and self.dim < 5 * self.rank + 4:
            raise ConfigError(f"4D consistency needs d >= 5r+4 = {5 * self.rank + 4}, got {self.dim}")
        if self.command in ('propagate', 'verify', 'extract', 'evolve', 'export-mesh', 'slice') and not self.input_path:
            raise ConfigError(f"{self.command} needs --in")
        if self.command in ('generate', 'propagate', 'extract', 'evolve', 'export-mesh', 'slice') and not self.output_path:
            raise ConfigError(f"{self.command} needs --out")
        if self.field_name not in FIELDS:
            raise ConfigError(f"unknown field {self.field_name!r}")
        return self

    def ledger_params(self) -> Dict[str, Any]:
        return {
            'n': self.n,
            'rank': self.rank,
            'dim': self.dim,
            'seed': self.seed,
            'region': str(self.region) if self.region is not None else None,
            'input_path': self.input_path,
            'output_path': self.output_path,
            'bound': self.bound,
            'workers': self.workers,
            'report_path': self.report_path,
        }


def check_propagation_bound(r: int, d: int) -> None:
    if d < 4 * r + 3:
        raise ConfigError(f"propagation needs d >= 4r+3 = {4 * r + 3}, got {d}")


@dataclass
class CommandResult:
    ok: bool
    report: List[str] = field(default_factory=list)
    checks: List[Tuple[str, bool, str]] = field(default_factory=list)
    check_kind: str = 'square'
    summary: Dict[str, Any] = field(default_factory=dict)


def _line(**pairs: Any) -> str:
    return " ".join(net_formats.report_lines(pairs.items()))


def _region_from(cfg: RunConfig, header: Dict[str, Any]) -> Region:
    if cfg.region is not None:
        region = cfg.region
    elif header.get('region'):
        region = Region.parse(header['region'])
    else:
        raise ConfigError("no --region given and the input file does not record one")
    if 'N' in header and region.N != int(header['N']):
        raise ConfigError(f"region {region} is {region.N}-dimensional, input is {header['N']}-dimensional")
    return region


def _square_loc(n, *axes) -> str:
    return f"{format_vertex(n)}/{','.join(str(a) for a in axes)}"


# ============================================================================
# Commands
# ============================================================================

def cmd_generate(cfg: RunConfig) -> CommandResult:
    region = cfg.region or Region((1,) * cfg.n)
    sampler = GeneralPositionSampler(bound=cfg.bound)
    rng = make_rng(cfg.seed)
    meta = {'seed': cfg.seed, 'bound': cfg.bound, 'region': str(region)}
    if cfg.kind == 'darboux':
        state, redraws = sampler.sample_darboux_state(cfg.n, cfg.rank, region, rng)
        count = net_formats.write_field(state, cfg.output_path, name='rotation', meta=meta)
        return CommandResult(True, [_line(kind='darboux', records=count, redraws=redraws)], summary={'records': count})

    if cfg.n >= 3:
        full = sampler.sample_propagated_net(cfg.n, cfg.rank, cfg.dim, region, rng)
        walls = full.restrict(region.wall_vertices())
    else:
        walls = sampler.sample_qnet_walls(cfg.n, cfg.rank, cfg.dim, region, rng)
    count = net_formats.write_qnet(walls, cfg.output_path, meta=meta)
    report = [_line(kind='qnet', records=count, resamples=sampler.stats.resamples)]
    return CommandResult(True, report, summary={'records': count, 'resamples': sampler.stats.resamples})


def cmd_propagate(cfg: RunConfig) -> CommandResult:
    walls, header = net_formats.read_qnet(cfg.input_path)
    check_propagation_bound(walls.r, walls.d)
    region = _region_from(cfg, header)
    net = propagate_net(walls, region, order=cfg.order, workers=cfg.workers)
    meta = {k: header[k] for k in ('seed', 'bound') if k in header}
    meta['region'] = str(region)
    net_formats.write_qnet(net, cfg.output_path, meta=meta)
    checks = sweep_squares(net, region)
    passed = sum(1 for c in checks if c.passed)
    report = [_line(vertices=len(net), squares=len(checks), passed=passed)]
    return CommandResult(
        passed == len(checks),
        report,
        [(_square_loc(c.vertex, c.i, c.j), c.passed, f"dim={c.dim}") for c in checks],
        summary={'vertices': len(net), 'squares': len(checks)},
    )


def cmd_verify(cfg: RunConfig) -> CommandResult:
    obj, header = net_formats.read_any(cfg.input_path)
    region = cfg.region or (Region.parse(header['region']) if header.get('region') else None)
    if isinstance(obj, EdgeNet):
        squares = edge_sweep(obj, None)
        bound = 2 * obj.r + 1
        kind = 'edge_square'
    elif header.get('format') == 'qnet':
        squares = sweep_squares(obj, None)
        bound = 3 * obj.r + 2
        kind = 'square'
    else:
        raise FormatError("verify expects a qnet or edgenet file")

    report = []
    checks = []
    for c in squares:
        report.append(_line(square=_square_loc(c.vertex, c.i, c.j), dim=c.dim, bound=bound, passed=c.passed))
        checks.append((_square_loc(c.vertex, c.i, c.j), c.passed, f"dim={c.dim}"))
    if isinstance(obj, EdgeNet) and region is not None and all(
        obj.has(n, i) for n, i in region.edges()
    ):
        for n, axes, ok in cube_span_sweep(obj, region):
            report.append(_line(cube=_square_loc(n, *axes), passed=ok))
            checks.append((_square_loc(n, *axes), ok, 'cube_span'))
    failed = sum(1 for _, ok, _ in checks if not ok)
    report.append(_line(checked=len(checks), failed=failed, status='pass' if not failed else 'fail'))
    return CommandResult(not failed, report, checks, check_kind=kind, summary={'checked': len(checks), 'failed': failed})


def cmd_extract(cfg: RunConfig) -> CommandResult:
    obj, header = net_formats.read_any(cfg.input_path)
    region = _region_from(cfg, header)
    meta = {'region': str(region), 'source': header.get('format')}
    checks: List[Tuple[str, bool, str]] = []

    if isinstance(obj, EdgeNet):
        r_field = r_field_from_net(obj, region)
        s = potentials_s(r_field, region)
        b = rotation_coeffs_darboux(s, region)
        y = darboux_y_variables(obj, s)
        fields = {'a': r_field, 'lame': s, 'rotation': b, 'y': y}
    else:
        bundle = coefficient_pipeline(obj, region)
        for n, i, j, k in region.cubes():
            ok = check_aa(bundle.a, n, i, j, k)
            checks.append((_square_loc(n, i, j, k), ok, 'closedness'))
        b, y = bundle.b, bundle.y
        fields = {'a': bundle.a, 'lame': bundle.h, 'rotation': b, 'y': y}

    for n, i, j in region.squares():
        for p, q in ((i, j), (j, i)):
            ok = linear_problem_residual(y, b, n, p, q).is_zero()
            checks.append((_square_loc(n, p, q), ok, 'linear_problem'))

    chosen = fields[cfg.field_name]
    count = net_formats.write_field(chosen, cfg.output_path, name=cfg.field_name, meta=meta)
    failed = sum(1 for _, ok, _ in checks if not ok)
    report = [_line(field=cfg.field_name, records=count, checks=len(checks), failed=failed)]
    return CommandResult(not failed, report, checks, check_kind='coefficients', summary={'records': count, 'failed': failed})


def cmd_evolve(cfg: RunConfig) -> CommandResult:
    field_, header = net_formats.read_field(cfg.input_path)
    if field_.kind != 'plaquette':
        raise FormatError("evolve expects a plaquette field")
    region = _region_from(cfg, header)
    state = DarbouxState.from_field(field_)
    walls = state.restrict(region.wall_plaquettes())
    out = evolve(walls, region, order=cfg.order)
    mismatched = [k for k, v in state.values.items() if k in out.values and out.values[k] != v]
    count = net_formats.write_field(out, cfg.output_path, name='rotation', meta={'region': str(region)})
    checks = [(_square_loc(k[0], *k[1:]), k not in mismatched, 'input_agreement') for k in state.keys() if k in out.values]
    report = [_line(plaquettes=count, compared=len(checks), mismatched=len(mismatched))]
    return CommandResult(not mismatched, report, checks, check_kind='evolution', summary={'plaquettes': count})


def cmd_consistency(cfg: RunConfig) -> CommandResult:
    if cfg.input_path:
        initial, _ = net_formats.read_qnet(cfg.input_path)
    else:
        sampler = GeneralPositionSampler(bound=cfg.bound)
        initial = sampler.sample_hypercube_data(cfg.rank, cfg.dim, make_rng(cfg.seed))
    rep = consistency_report(initial)
    report = [
        _line(r=rep.r, d=rep.d, candidates=len(rep.candidates)),
        _line(consistent=rep.consistent, matches_v_meet=rep.matches_v_meet),
    ]
    checks = [('4d', rep.consistent, 'candidates'), ('v_meet', rep.matches_v_meet, 'v_meet')]
    return CommandResult(rep.consistent, report, checks, check_kind='consistency', summary={'consistent': rep.consistent})


def cmd_export_mesh(cfg: RunConfig) -> CommandResult:
    net, _ = net_formats.read_qnet(cfg.input_path)
    mesh = mesh_from_net(net, axes=cfg.axes, fixed=cfg.fixed)
    write_obj(mesh, cfg.output_path)
    return CommandResult(True, [_line(vertices=len(mesh.vertices), faces=len(mesh.faces))],
                         summary={'vertices': len(mesh.vertices), 'faces': len(mesh.faces)})


def cmd_slice(cfg: RunConfig) -> CommandResult:
    net, header = net_formats.read_qnet(cfg.input_path)
    sampler = GeneralPositionSampler(bound=cfg.bound)
    plane, edges = sampler.sample_slicing_plane(net, make_rng(cfg.seed))
    meta = {'seed': cfg.seed, 'plane': plane.basis.to_text_rows()}
    if header.get('region'):
        meta['region'] = header['region']
    count = net_formats.write_edgenet(edges, cfg.output_path, meta=meta)
    checks = edge_sweep(edges)
    failed = sum(1 for c in checks if not c.passed)
    report = [_line(edges=count, squares=len(checks), failed=failed)]
    return CommandResult(
        not failed,
        report,
        [(_square_loc(c.vertex, c.i, c.j), c.passed, f"dim={c.dim}") for c in checks],
        check_kind='edge_square',
        summary={'edges': count},
    )


HANDLERS: Dict[str, Callable[[RunConfig], CommandResult]] = {
    'generate': cmd_generate,
    'propagate': cmd_propagate,
    'verify': cmd_verify,
    'extract': cmd_extract,
    'evolve': cmd_evolve,
    'consistency': cmd_consistency,
    'export-mesh': cmd_export_mesh,
    'slice': cmd_slice,
}


# ============================================================================
# Entry point
# ============================================================================

def _parse_axes(text: str) -> Tuple[int, int]:
    parts = [int(p) for p in str(text).split(',') if p.strip()]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected two axes like 0,1")
    return parts[0], parts[1]


def _parse_fixed(text: str) -> Dict[int, int]:
    out = {}
    for item in str(text).split(','):
        if not item.strip():
            continue
        axis, _, value = item.partition('=')
        out[int(axis)] = int(value)
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='grassnet', description='Exact Grassmannian Q-nets and Darboux systems')
    parser.add_argument('command', choices=COMMANDS)
    parser.add_argument('--n', type=int, default=3, help='Lattice dimension N')
    parser.add_argument('--rank', type=int, default=0, help='Rank r of the planes')
    parser.add_argument('--dim', type=int, default=None, help='Ambient projective dimension d')
    parser.add_argument('--seed', type=int, default=getattr(config, 'DEFAULT_SEED', 1))
    parser.add_argument('--bound', type=int, default=getattr(config, 'SAMPLE_ENTRY_BOUND', 10))
    parser.add_argument('--region', type=str, default=None, help='Cells per axis, e.g. 2,2,2')
    parser.add_argument('--in', dest='input_path', default=None)
    parser.add_argument('--out', dest='output_path', default=None)
    parser.add_argument('--report', dest='report_path', default=None)
    parser.add_argument('--kind', choices=('qnet', 'darboux'), default='qnet')
    parser.add_argument('--field', choices=FIELDS, default='rotation')
    parser.add_argument('--order', choices=('lexicographic', 'reverse'), default='lexicographic')
    parser.add_argument('--workers', type=int, default=getattr(config, 'PROPAGATION_WORKERS', 1))
    parser.add_argument('--axes', type=_parse_axes, default=(0, 1), help='Mesh axes, e.g. 0,1')
    parser.add_argument('--fix', type=_parse_fixed, default={}, help='Fixed coordinates, e.g. 2=0')
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    try:
        region = Region.parse(args.region) if args.region else None
    except ValueError as e:
        raise ConfigError(f"invalid region {args.region!r}: {e}") from None
    return RunConfig(
        command=args.command,
        n=args.n,
        rank=args.rank,
        dim=args.dim,
        region=region,
        seed=args.seed,
        bound=args.bound,
        input_path=args.input_path,
        output_path=args.output_path,
        report_path=args.report_path,
        kind=args.kind,
        field_name=args.field,
        order=args.order,
        workers=args.workers,
        axes=args.axes,
        fixed=args.fix,
    ).validate()


def _emit(cfg: Optional[RunConfig], lines: List[str]) -> None:
    text = "\n".join(lines) + "\n"
    if cfg is not None and cfg.report_path:
        with open(cfg.report_path, 'w', encoding='utf-8', newline='\n') as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _ledger():
    if not getattr(config, 'LEDGER_ENABLED', True):
        return None
    try:
        return get_db()
    except Exception as e:
        print(f"⚠️ Run ledger unavailable: {e}", file=sys.stderr)
        return None


def run(cfg: RunConfig) -> int:
    db = _ledger()
    run_id = None
    if db is not None:
        try:
            run_id = db.start_run(cfg.command, cfg.ledger_params())
        except Exception:
            run_id = None

    def _finish(status: str, summary: Any) -> None:
        if db is not None and run_id is not None:
            try:
                db.finish_run(run_id, status, summary)
            except Exception:
                pass

    try:
        result = HANDLERS[cfg.command](cfg)
    except OSError as e:
        print(f"❌ {e}", file=sys.stderr)
        if db is not None:
            db.log('ERROR', 'cli', f"{cfg.command} failed: {e}")
        _finish('error', {'error': 'OSError', 'message': str(e)})
        return 3
    except GrassnetError as e:
        code = 2 if isinstance(e, ConfigError) else 3 if isinstance(e, FormatError) else 1
        _emit(cfg, [_line(status='error', error=type(e).__name__, location=format_location(e.location) if e.location is not None else '-')])
        print(f"❌ {e}", file=sys.stderr)
        if db is not None:
            db.log('ERROR', 'cli', f"{cfg.command} failed: {type(e).__name__}: {e}")
        _finish('error', {'error': type(e).__name__, 'message': str(e)})
        return code

    if db is not None and run_id is not None:
        try:
            db.record_checks(run_id, result.check_kind, result.checks)
        except Exception:
            pass
    _emit(cfg, result.report)
    if result.ok:
        print(f"✅ {cfg.command} done", file=sys.stderr)
        _finish('ok', result.summary)
        return 0
    print(f"❌ {cfg.command}: exact check failed", file=sys.stderr)
    if db is not None:
        db.log('WARNING', 'cli', f"{cfg.command} finished with failed checks: {result.summary}")
    _finish('failed', result.summary)
    return 1


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ConfigError as e:
        print(f"❌ {e}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
