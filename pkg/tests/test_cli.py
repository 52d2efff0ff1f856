import pytest

import net_formats
from cli import RunConfig, build_parser, config_from_args, main
from core.errors import ConfigError
from db.db import get_db


def _report(path):
    return dict(net_formats.parse_report(path.read_text()))


def test_generate_propagate_verify(tmp_path):
    walls = tmp_path / "walls.jsonl"
    full = tmp_path / "full.jsonl"
    report = tmp_path / "report.txt"
    assert main(['generate', '--n', '3', '--rank', '0', '--region', '1,1,1', '--seed', '5', '--out', str(walls)]) == 0
    assert main(['propagate', '--in', str(walls), '--out', str(full)]) == 0
    net, header = net_formats.read_qnet(str(full))
    assert len(net) == 8 and header['region'] == '1x1x1'
    assert main(['verify', '--in', str(full), '--report', str(report)]) == 0
    text = report.read_text()
    assert 'status=pass' in text
    assert text.count('square=') == 6


def test_verify_reports_failure(tmp_path):
    net_path = tmp_path / "bent.jsonl"
    net_path.write_text(
        '{"format": "qnet", "version": 1, "N": 2, "r": 0, "d": 3}\n'
        '{"n": [0, 0], "rows": [["0", "0", "0", "1"]]}\n'
        '{"n": [1, 0], "rows": [["1", "0", "0", "1"]]}\n'
        '{"n": [0, 1], "rows": [["0", "1", "0", "1"]]}\n'
        '{"n": [1, 1], "rows": [["1", "1", "1", "1"]]}\n'
    )
    report = tmp_path / "report.txt"
    assert main(['verify', '--in', str(net_path), '--report', str(report)]) == 1
    assert 'status=fail' in report.read_text()
    failed = get_db().get_check_results(get_db().get_recent_runs(limit=1)[0]['id'], failed_only=True)
    assert failed and failed[0]['location'] == '0,0/0,1'


def test_extract_and_evolve(tmp_path):
    walls = tmp_path / "walls.jsonl"
    full = tmp_path / "full.jsonl"
    b = tmp_path / "b.jsonl"
    evolved = tmp_path / "evolved.jsonl"
    assert main(['generate', '--n', '3', '--rank', '0', '--region', '1,1,1', '--seed', '8', '--out', str(walls)]) == 0
    assert main(['propagate', '--in', str(walls), '--out', str(full)]) == 0
    assert main(['extract', '--in', str(full), '--field', 'rotation', '--out', str(b)]) == 0
    field_, header = net_formats.read_field(str(b))
    # b^{ij} and b^{ji} on each of the six squares
    assert field_.kind == 'plaquette' and len(field_) == 12
    assert main(['evolve', '--in', str(b), '--out', str(evolved), '--report', str(tmp_path / "r.txt")]) == 0
    assert _report(tmp_path / "r.txt")['mismatched'] == '0'


def test_generate_darboux_and_evolve(tmp_path):
    state = tmp_path / "state.jsonl"
    out = tmp_path / "out.jsonl"
    assert main(['generate', '--kind', 'darboux', '--n', '3', '--rank', '1', '--region', '2,2,2', '--out', str(state)]) == 0
    assert main(['evolve', '--in', str(state), '--out', str(out), '--order', 'reverse']) == 0
    field_, _ = net_formats.read_field(str(out))
    assert len(field_) == 72


def test_consistency(tmp_path):
    report = tmp_path / "c.txt"
    assert main(['consistency', '--rank', '1', '--seed', '3', '--report', str(report)]) == 0
    values = _report(report)
    assert values['consistent'] == 'true' and values['d'] == '9'


def test_export_mesh(tmp_path):
    walls = tmp_path / "grid.jsonl"
    obj = tmp_path / "grid.obj"
    assert main(['generate', '--n', '2', '--rank', '0', '--dim', '3', '--region', '2,2', '--out', str(walls)]) == 0
    assert main(['export-mesh', '--in', str(walls), '--out', str(obj)]) == 0
    lines = obj.read_text().splitlines()
    assert sum(1 for l in lines if l.startswith('v ')) == 9
    assert sum(1 for l in lines if l.startswith('f ')) == 4


def test_slice_then_verify(tmp_path):
    walls = tmp_path / "walls.jsonl"
    full = tmp_path / "full.jsonl"
    edges = tmp_path / "edges.jsonl"
    assert main(['generate', '--n', '3', '--rank', '0', '--region', '1,1,1', '--out', str(walls)]) == 0
    assert main(['propagate', '--in', str(walls), '--out', str(full)]) == 0
    assert main(['slice', '--in', str(full), '--seed', '2', '--out', str(edges)]) == 0
    report = tmp_path / "v.txt"
    assert main(['verify', '--in', str(edges), '--report', str(report)]) == 0
    assert 'cube=0,0,0/0,1,2 passed=true' in report.read_text()


def test_invalid_configuration_exit_code(tmp_path):
    assert main(['consistency', '--rank', '1', '--dim', '6']) == 2
    assert main(['propagate', '--out', str(tmp_path / "x")]) == 2
    assert main(['generate', '--n', '3', '--rank', '1', '--dim', '5', '--out', str(tmp_path / "x")]) == 2


def test_unreadable_file_exit_code(tmp_path):
    assert main(['verify', '--in', str(tmp_path / "missing.jsonl")]) == 3


def test_degeneracy_exit_code(tmp_path):
    walls = tmp_path / "walls.jsonl"
    walls.write_text(
        '{"format": "qnet", "version": 1, "N": 3, "r": 0, "d": 3, "region": "1x1x1"}\n'
        + "".join(
            '{"n": [%d, %d, %d], "rows": [["1", "2", "3", "1"]]}\n' % n
            for n in [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (1, 0, 1)]
        )
        + '{"n": [0, 1, 1], "rows": [["0", "0", "0", "1"]]}\n'
    )
    report = tmp_path / "r.txt"
    assert main(['propagate', '--in', str(walls), '--out', str(tmp_path / "o.jsonl"), '--report', str(report)]) == 1
    values = _report(report)
    assert values['status'] == 'error' and values['error'] == 'DegenerateInput'


def test_bad_argument_exits():
    with pytest.raises(SystemExit):
        build_parser().parse_args(['teleport'])


def test_run_config_defaults():
    assert RunConfig('propagate', rank=2).dim == 11
    assert RunConfig('consistency', rank=2).dim == 14
    with pytest.raises(ConfigError):
        RunConfig('generate', rank=-1, output_path='x').validate()


def test_config_from_args_rejects_region():
    args = build_parser().parse_args(['generate', '--region', '2,a', '--out', 'x'])
    with pytest.raises(ConfigError):
        config_from_args(args)


def test_generate_is_deterministic(tmp_path):
    first, second = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    for path in (first, second):
        assert main(['generate', '--n', '3', '--rank', '1', '--seed', '1', '--out', str(path)]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_region_of_wrong_dimension_is_a_config_error(tmp_path):
    walls = tmp_path / "walls.jsonl"
    assert main(['generate', '--n', '3', '--rank', '0', '--region', '1,1,1', '--seed', '2', '--out', str(walls)]) == 0
    report = tmp_path / "r.txt"
    code = main(['propagate', '--in', str(walls), '--region', '1,1', '--out', str(tmp_path / "o.jsonl"),
                 '--report', str(report)])
    assert code == 2
    assert _report(report)['error'] == 'ConfigError'


def test_consistency_needs_a_four_dimensional_net(tmp_path):
    walls = tmp_path / "walls.jsonl"
    assert main(['generate', '--n', '3', '--rank', '0', '--dim', '4', '--region', '1,1,1', '--out', str(walls)]) == 0
    assert main(['consistency', '--in', str(walls)]) == 2
