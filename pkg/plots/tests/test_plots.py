import hashlib
import shutil
from pathlib import Path

import pytest

from gaitevo_plots.cli import main as cli_main
from gaitevo_plots.figures import (
    FIGURE_KINDS,
    SchemaMismatch,
    build_figure,
    load_final,
    load_summary,
    render,
)

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def results_dir(tmp_path):
    for name in ("summary.csv", "final_fitness.csv"):
        shutil.copy(FIXTURES / name, tmp_path / name)
    return tmp_path


def sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def test_fixture_is_a_recorded_desk_run(results_dir):
    rows = load_summary(results_dir)
    generations = sorted({r["generation"] for r in rows})
    assert generations == list(range(1, 11))  # desk preset: 10 generations
    assert {r["mode"] for r in rows} == {"evo", "evo+learn"}
    finals = load_final(results_dir)
    assert len(finals) == 6  # 2 modes x 3 repetitions


@pytest.mark.parametrize("kind", FIGURE_KINDS)
def test_all_kinds_render_and_are_deterministic(results_dir, tmp_path, kind):
    out_a = tmp_path / f"{kind}_a.png"
    out_b = tmp_path / f"{kind}_b.png"
    render(kind, results_dir, out_a)
    render(kind, results_dir, out_b)
    assert out_a.stat().st_size > 0
    assert sha256(out_a) == sha256(out_b)


def test_plotting_never_modifies_inputs(results_dir, tmp_path):
    before = {p.name: p.read_bytes() for p in results_dir.glob("*.csv")}
    for kind in FIGURE_KINDS:
        render(kind, results_dir, tmp_path / f"{kind}.png")
    after = {p.name: p.read_bytes() for p in results_dir.glob("*.csv")}
    assert before == after


def test_progression_has_two_mean_lines_and_legend(results_dir):
    fig = build_figure("progression", results_dir)
    ax = fig.axes[0]
    solid = [ln for ln in ax.get_lines() if ln.get_linestyle() == "-"]
    dotted = [ln for ln in ax.get_lines() if ln.get_linestyle() == ":"]
    assert len(solid) == 2
    assert len(dotted) == 2
    assert ax.get_legend() is not None
    # desk preset: one tick per generation
    assert len(ax.get_xticks()) == 10


def test_descriptor_grid_is_two_by_three(results_dir):
    fig = build_figure("descriptors", results_dir)
    assert len(fig.axes) == 6


def test_schema_mismatch_names_expected_version(results_dir):
    bad = results_dir / "summary.csv"
    bad.write_text("# schema: gaitevo-summary v999\nmode,generation\n")
    with pytest.raises(SchemaMismatch, match="gaitevo-summary v1"):
        load_summary(results_dir)
    rc = cli_main(["--kind", "progression", "--in", str(results_dir), "--out", str(results_dir / "x.png")])
    assert rc == 2


def test_empty_but_valid_csv_renders(tmp_path):
    (tmp_path / "summary.csv").write_text(
        "# schema: gaitevo-summary v1\nmode,generation,n_runs,fitness_mean,fitness_mean_lo,fitness_mean_hi\n"
    )
    (tmp_path / "final_fitness.csv").write_text(
        "# schema: gaitevo-final-fitness v1\nmode,run,fitness_mean,fitness_max\n"
    )
    for kind in FIGURE_KINDS:
        rc = cli_main(["--kind", kind, "--in", str(tmp_path), "--out", str(tmp_path / f"{kind}.png")])
        assert rc == 0
        assert (tmp_path / f"{kind}.png").exists()


def test_cli_renders_all_kinds(results_dir, tmp_path):
    for kind in FIGURE_KINDS:
        out = tmp_path / f"cli_{kind}.png"
        rc = cli_main(["--kind", kind, "--in", str(results_dir), "--out", str(out)])
        assert rc == 0
        assert out.exists()


def test_style_override(results_dir, tmp_path):
    style = tmp_path / "style.json"
    style.write_text('{"colors": {"evo": "black"}, "dpi": 60}')
    out = tmp_path / "styled.png"
    rc = cli_main(
        ["--kind", "progression", "--in", str(results_dir), "--out", str(out), "--style", str(style)]
    )
    assert rc == 0
    plain = tmp_path / "plain.png"
    cli_main(["--kind", "progression", "--in", str(results_dir), "--out", str(plain)])
    assert sha256(out) != sha256(plain)
