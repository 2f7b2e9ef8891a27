import pytest

import myosolve


def test_default_config_has_registered_keys():
    cfg = myosolve.default_config()
    for key in ("mesh.kind", "solver.type", "bddc.primal", "time.steps"):
        assert key in cfg
    assert cfg["solver.type"] == "bddc"


def test_validation_reports_every_problem():
    problems = myosolve.validate_config({"no.such.key": "1", "fem.order": "7"})
    assert len(problems) == 2
    assert any("no.such.key" in p for p in problems)
    assert any("fem.order" in p for p in problems)


def test_case_info_counts_beam_dofs():
    info = myosolve.case_info(
        {"mesh.nx": "4", "mesh.ny": "2", "mesh.nz": "2", "partition.px": "2"}
    )
    assert info["n_hexes"] == 16
    assert info["n_dofs"] == 5 * 3 * 3 * 3
    assert info["n_subdomains"] == 2


def test_invalid_config_raises():
    with pytest.raises(ValueError):
        myosolve.case_info({"mesh.kind": "sphere"})


def test_small_transient_run():
    report = myosolve.run_bench(
        {
            "mesh.nx": "4",
            "mesh.ny": "2",
            "mesh.nz": "2",
            "partition.px": "2",
            "time.steps": "2",
            "load.pressure": "4",
            "material.rho": "1",
        }
    )
    assert report["schema_version"] == 1
    (run,) = report["runs"]
    assert run["ok"]
    assert len(run["steps"]) == 2
    total = sum(sum(s["linear_iters"]) for s in run["steps"])
    assert total == run["aggregates"]["total_linear_iters"] > 0
