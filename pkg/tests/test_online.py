import numpy as np
import pytest

from minent.estimators import collision_theta
from minent.online import online_init, online_snapshot, online_update
from minent.sources import SourceSpec, sample


def run_stream(blocks, l=6, track_indices=False):
    state = online_init(int(blocks[0]), l, track_indices=track_indices)
    estimates = []
    for block in blocks[1:]:
        state, h = online_update(state, int(block))
        estimates.append(h)
    return state, estimates


def test_init_states():
    s = online_init(0, 6)
    assert (s.k, s.collisions, s.last_block) == (1, 0, 0)
    s = online_init(63, 6)
    assert s.last_block == 63 and s.b == 64
    with pytest.raises(ValueError):
        online_init(64, 6)


def test_update_rejects_out_of_alphabet_and_keeps_state():
    s = online_init(1, 6)
    with pytest.raises(ValueError):
        online_update(s, 64)
    assert s.k == 1 and s.collisions == 0 and s.last_block == 1


def test_constant_stream_estimates_decay_to_zero():
    state, estimates = run_stream(np.full(2000, 9))
    assert state.collisions == state.k - 1
    assert estimates[-1] == pytest.approx(0.0, abs=2e-3)
    # nonincreasing information for a constant source after the second block
    assert all(b <= a + 1e-15 for a, b in zip(estimates, estimates[1:]))


def test_uniform_stream_estimates_full_entropy():
    spec = SourceSpec("near_uniform", 1.0 / 64, n_blocks=1_000_000, seed=31)
    state, estimates = run_stream(sample(spec))
    assert estimates[-1] > 0.95


def test_collision_index_tracking_is_optional():
    blocks = [5, 5, 7, 7, 7, 1]
    state, _ = run_stream(np.array(blocks))
    assert state.collision_indices is None
    state, _ = run_stream(np.array(blocks), track_indices=True)
    assert state.collision_indices == [2, 4, 5]
    assert len(state.collision_indices) == state.collisions


def test_final_estimate_replays_batch_counting_convention():
    rng = np.random.default_rng(5)
    for _ in range(25):
        n = int(rng.integers(2, 3000))
        blocks = rng.integers(0, 64, size=n)
        state, estimates = run_stream(blocks)
        hits = int(np.count_nonzero(blocks[1:] == blocks[:-1]))
        assert state.collisions == hits and state.k == n
        theta = collision_theta(hits / n, 64)
        assert estimates[-1] == -np.log2(theta) / 6  # bit-for-bit

def test_snapshot_reports_running_frequency():
    state = online_init(3, 6)
    online_update(state, 3)
    online_update(state, 3)
    online_update(state, 7)
    k, p_c, theta, h = online_snapshot(state)
    assert (k, p_c) == (4, 0.5)
    assert theta == collision_theta(0.5, 64)
