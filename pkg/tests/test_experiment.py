"""Tests for the experiment service."""

import math

import pytest

from dalpha_seeding.constants import InstanceFamily, InstancePreset, SeedingMethod
from dalpha_seeding.core.models import (
    Dataset,
    ExperimentConfig,
    InstanceSpec,
    LemmaReport,
    TrialResult,
)
from dalpha_seeding.data.storage import results_frame, save_csv
from dalpha_seeding.exceptions import LemmaViolationError, UsageError
from dalpha_seeding.instances import preset_spec
from dalpha_seeding.services import experiment_service
from dalpha_seeding.services.experiment_service import run_experiment, summarize


def _config(**overrides) -> ExperimentConfig:
    values = dict(
        instance=preset_spec(InstancePreset.D1, n=120, seed=5),
        alphas=[2.0, 6.0, math.inf],
        methods=[SeedingMethod.DALPHA, SeedingMethod.UNIFORM],
        trials=3,
        run_lloyd=True,
        base_seed=17,
    )
    values.update(overrides)
    return ExperimentConfig(**values)


def test_results_are_ordered_by_alpha_method_trial():
    outcome = run_experiment(_config())
    keys = [(r.alpha, r.method, r.trial) for r in outcome.results]
    expected = [
        (alpha, method, trial)
        for alpha in (2.0, 6.0, math.inf)
        for method in (SeedingMethod.DALPHA, SeedingMethod.UNIFORM)
        for trial in range(3)
    ]
    assert keys == expected
    assert [(row.alpha, row.method) for row in outcome.summary] == [
        (alpha, method) for alpha, method, trial in expected if trial == 0
    ]


def test_lloyd_never_increases_the_ratio():
    outcome = run_experiment(_config())
    for r in outcome.results:
        assert r.seed_ratio >= 0.0
        assert r.lloyd_cost2 <= r.seed_cost2 * (1.0 + 1e-9)
        assert r.lloyd_ratio <= r.seed_ratio * (1.0 + 1e-9)
        assert r.lloyd_iters >= 1


def test_reruns_and_worker_counts_give_identical_results():
    first = results_frame(run_experiment(_config(), workers=1).results)
    again = results_frame(run_experiment(_config(), workers=1).results)
    parallel = results_frame(run_experiment(_config(), workers=2).results)
    assert first.equals(again)
    assert first.equals(parallel)


def test_resampling_per_trial_is_reproducible():
    config = _config(resample_per_trial=True, run_lloyd=False)
    first = results_frame(run_experiment(config).results)
    assert first.equals(results_frame(run_experiment(config).results))
    assert first["lloyd_ratio"].null_count() == first.height


def test_k_equal_n_gives_zero_ratio():
    config = ExperimentConfig(
        instance=InstanceSpec(family=InstanceFamily.GALPHA_LB, n=4, alpha=4.0),
        alphas=[4.0],
        k=8,
        trials=1,
    )
    (result,) = run_experiment(config).results
    assert result.seed_cost2 == 0.0
    assert result.seed_ratio == 0.0


def test_lemma_checks_pass_on_mixture():
    outcome = run_experiment(_config(alphas=[2.0, 4.0], check_lemmas=True))
    assert all(r.lemma_flags == "" for r in outcome.results)


def test_lemma_violation_aborts(monkeypatch):
    def failing(ds, trace):
        report = LemmaReport()
        report.check("potential_upper_bound").record(-1.0, False)
        return report

    monkeypatch.setattr(experiment_service, "verify_run", failing)
    with pytest.raises(LemmaViolationError) as info:
        run_experiment(_config(check_lemmas=True, trials=1))
    assert info.value.report.violations > 0


def test_lemma_violation_stops_remaining_trials(monkeypatch):
    calls = []

    def failing_second(ds, trace):
        calls.append(trace.centers)
        report = LemmaReport()
        report.check("potential_upper_bound").record(-1.0, len(calls) != 2)
        return report

    monkeypatch.setattr(experiment_service, "verify_run", failing_second)
    config = _config(alphas=[4.0], methods=[SeedingMethod.DALPHA], trials=6, check_lemmas=True)
    with pytest.raises(LemmaViolationError) as info:
        run_experiment(config, workers=1)
    assert len(calls) == 2
    assert info.value.details["trial"] == 1
    assert info.value.report.violations == 1


def test_unlabeled_instance_is_rejected(tmp_path):
    path = tmp_path / "plain.csv"
    save_csv(Dataset(points=[[0.0], [1.0], [5.0]]), path)
    config = ExperimentConfig(
        instance=InstanceSpec(family=InstanceFamily.CUSTOM_CSV, path=path),
        alphas=[2.0],
        k=2,
        trials=1,
    )
    with pytest.raises(UsageError):
        run_experiment(config)


def test_summary_statistics():
    results = [
        TrialResult(alpha=2.0, method=SeedingMethod.DALPHA, trial=t, seed_cost2=1.0, seed_ratio=v)
        for t, v in enumerate([1.0, 2.0, 3.0])
    ]
    results.append(
        TrialResult(alpha=4.0, method=SeedingMethod.DALPHA, trial=0, seed_cost2=1.0, seed_ratio=5.0)
    )
    first, second = summarize(results)
    assert first.trials == 3
    assert first.mean_seed_ratio == pytest.approx(2.0)
    assert first.std_seed_ratio == pytest.approx(1.0)
    assert first.sem_seed_ratio == pytest.approx(1.0 / math.sqrt(3.0))
    assert first.mean_lloyd_ratio is None
    assert second.trials == 1
    assert second.std_seed_ratio == 0.0
    assert summarize([]) == []
