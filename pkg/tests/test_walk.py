import math

import numpy as np
import pytest

from ouwoms import (
    Boundary,
    ExitProblem,
    OUParams,
    StepLimitExceeded,
    compute_d,
    ecdf,
    ks_critical,
    next_state,
    run_batch,
    run_batch_arrays,
    run_walk,
    sample_spheroid_exit,
    walk_stream,
)

FIG1 = ExitProblem(params=OUParams(theta=0.1, sigma=1.0), a=2.0, b=7.0,
                   x0=5.0, eps=1e-3, gamma_shrink=1e-6)


class TestRunWalk:
    def test_immediate_exit_upper(self):
        prob = ExitProblem(params=OUParams(theta=0.1, sigma=1.0), a=2.0,
                           b=7.0, x0=6.9995, eps=1e-3)
        out = run_walk(prob, walk_stream(3))
        assert out == run_walk(prob, walk_stream(4))  # no randomness consumed
        assert (out.t_eps, out.n_steps, out.side) == (0.0, 0, Boundary.UPPER)
        assert out.x_final == 6.9995

    def test_immediate_exit_lower(self):
        prob = ExitProblem(params=OUParams(theta=0.1, sigma=1.0), a=2.0,
                           b=7.0, x0=1.0, eps=1e-3)
        out = run_walk(prob, walk_stream(3))
        assert (out.t_eps, out.n_steps, out.side) == (0.0, 0, Boundary.LOWER)

    def test_deterministic_given_stream(self):
        a = run_walk(FIG1, walk_stream(42), keep_trace=True)
        b = run_walk(FIG1, walk_stream(42), keep_trace=True)
        assert a == b

    def test_stream_advances_three_per_step(self):
        s = walk_stream(42)
        out = run_walk(FIG1, s)
        assert s.counter == 3 * out.n_steps

    def test_stopped_in_a_band(self):
        for seed in range(20):
            out = run_walk(FIG1, walk_stream(seed))
            if out.side is Boundary.UPPER:
                assert out.x_final >= FIG1.b - FIG1.eps
            else:
                assert out.x_final <= FIG1.a + FIG1.eps

    def test_requires_centered(self):
        prob = ExitProblem(params=OUParams(theta=0.1, sigma=1.0, mu=1.0),
                           a=2.0, b=7.0, x0=5.0, eps=1e-3)
        with pytest.raises(ValueError, match="mu"):
            run_walk(prob, walk_stream(0))

    def test_vanishing_noise_follows_deterministic_flow(self):
        # as sigma -> 0 the exit time approaches log(x0/(a+eps))/theta
        prob = ExitProblem(params=OUParams(theta=0.1, sigma=1e-6), a=2.0,
                           b=7.0, x0=5.0, eps=1e-3)
        expected = math.log(5.0 / 2.001) / 0.1
        for seed in range(10):
            out = run_walk(prob, walk_stream(seed))
            assert out.side is Boundary.LOWER
            assert abs(out.t_eps - expected) < 0.05

    def test_step_limit(self):
        with pytest.raises(StepLimitExceeded) as err:
            run_walk(FIG1, walk_stream(42), max_steps=3)
        assert "replicate 0" in str(err.value)


class TestTrace:
    def test_trace_shape_and_start(self):
        out = run_walk(FIG1, walk_stream(7), keep_trace=True)
        assert out.trace is not None
        assert len(out.trace) == out.n_steps + 1
        assert out.trace[0] == (0, 0.0, FIG1.x0)
        assert out.trace[-1].t == out.t_eps
        assert out.trace[-1].x == out.x_final

    def test_time_strictly_increasing(self):
        out = run_walk(FIG1, walk_stream(11), keep_trace=True)
        times = [s.t for s in out.trace]
        assert all(t1 > t0 for t0, t1 in zip(times, times[1:]))

    def test_confined_to_interval(self):
        for seed in range(25):
            out = run_walk(FIG1, walk_stream(seed), keep_trace=True)
            xs = np.array([s.x for s in out.trace])
            assert np.all(xs >= FIG1.a) and np.all(xs <= FIG1.b)
            # interior until the stopping step
            assert np.all(xs[:-1] > FIG1.a + FIG1.eps)
            assert np.all(xs[:-1] < FIG1.b - FIG1.eps)

    def test_replays_public_operations(self):
        # the engine's step is the composition compute_d -> sample -> next_state
        out = run_walk(FIG1, walk_stream(123), keep_trace=True)
        s = walk_stream(123)
        x, t = FIG1.x0, 0.0
        for node in out.trace[1:]:
            geom = compute_d(x, FIG1)
            exit_ = sample_spheroid_exit(geom.d, s)
            tau_ou, x = next_state(x, exit_, geom, FIG1.params)
            t += tau_ou
            assert t == pytest.approx(node.t, rel=1e-12, abs=1e-12)
            assert x == pytest.approx(node.x, rel=1e-12)
        assert s.counter == 3 * out.n_steps


class TestRunBatch:
    def test_single_equals_run_walk(self):
        batch = run_batch(FIG1, 1, 777)
        alone = run_walk(FIG1, walk_stream(777, 0))
        assert batch[0] == alone

    def test_replicates_independent_of_batch_size(self):
        big = run_batch(FIG1, 50, 31)
        small = run_batch(FIG1, 7, 31)
        assert big[:7] == small

    def test_parallelism_invariance(self):
        serial = run_batch_arrays(FIG1, 500, 99, parallelism=1)
        threaded = run_batch_arrays(FIG1, 500, 99, parallelism=4)
        for lhs, rhs in zip(serial, threaded):
            assert np.array_equal(lhs, rhs)

    def test_validation(self):
        with pytest.raises(ValueError, match="n_samples"):
            run_batch(FIG1, 0, 1)

    def test_step_limit_reports_replicate(self):
        with pytest.raises(StepLimitExceeded) as err:
            run_batch(FIG1, 20, 5, max_steps=2)
        assert err.value.replicate >= 0

    def test_coarser_stopping_stops_earlier_pathwise(self):
        # shared streams couple the walks: the wide-band walk stops on the
        # same skeleton no later than the tight-band walk
        tight = ExitProblem(params=FIG1.params, a=2.0, b=7.0, x0=5.0,
                            eps=1e-3, gamma_shrink=1e-6)
        wide = ExitProblem(params=FIG1.params, a=2.0, b=7.0, x0=5.0,
                           eps=1e-1, gamma_shrink=1e-6)
        bt = run_batch_arrays(tight, 2000, 13)
        bw = run_batch_arrays(wide, 2000, 13)
        assert np.all(bw.t_eps <= bt.t_eps)
        assert np.all(bw.n_steps <= bt.n_steps)

    def test_stochastic_domination_across_eps(self):
        # independent batches: F_tight(t) <= F_wide(t) + two-sample noise
        n = 4000
        tight = run_batch_arrays(FIG1, n, 101).t_eps
        wide_prob = ExitProblem(params=FIG1.params, a=2.0, b=7.0, x0=5.0,
                                eps=1e-1, gamma_shrink=1e-6)
        wide = run_batch_arrays(wide_prob, n, 202).t_eps
        f_tight, f_wide = ecdf(tight), ecdf(wide)
        grid = np.union1d(tight, wide)
        slack = 2.0 * ks_critical(n, alpha=0.01, m=n)
        assert np.all(f_tight(grid) <= f_wide(grid) + slack)

    def test_step_count_grows_like_log_eps(self):
        means = []
        for k, eps in enumerate((1e-1, 1e-2, 1e-3)):
            prob = ExitProblem(params=FIG1.params, a=2.0, b=7.0, x0=5.0,
                               eps=eps, gamma_shrink=1e-6)
            means.append(run_batch_arrays(prob, 2000, 400 + k).n_steps.mean())
        ratios = [m / abs(math.log(e))
                  for m, e in zip(means, (1e-1, 1e-2, 1e-3))]
        assert max(ratios) / min(ratios) < 3.0
