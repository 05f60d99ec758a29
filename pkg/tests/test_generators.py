from hypothesis import given, settings
from hypothesis import strategies as st

from lampar.core import Nu, size
from lampar.generators import GenConfig, generator_registry, random_program, random_thread
from lampar.ndredux import is_deterministic
from lampar.properties import Violation, subject_reduction, topology
from lampar.topology import TopologyGraph
from lampar.typecheck import check_program, infer_simply_typed

REG = generator_registry()


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**9))
def test_generated_programs_are_well_typed_and_small(seed):
    t = random_program(seed, registry=REG)
    assert check_program(t).ok
    assert size(t) <= GenConfig().max_size
    if isinstance(t, Nu):
        assert t.instance.m <= GenConfig().max_processes


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_generated_threads_are_simply_typed(seed):
    t = random_thread(seed, registry=REG)
    assert infer_simply_typed(None, t).ok
    assert size(t) <= 40


def test_generation_is_seeded():
    assert random_program(42, registry=REG) == random_program(42, registry=REG)
    assert random_program(42, registry=REG) != random_program(43, registry=REG)


def test_generator_reaches_channels():
    nus = [random_program(s, registry=REG) for s in range(200)]
    with_chans = [t for t in nus if isinstance(t, Nu) and not all(is_deterministic(u) for p in t.processes for u in p.threads)]
    assert len(with_chans) > 100


def test_small_config_is_respected():
    cfg = GenConfig(max_size=15, max_processes=2)
    for s in range(50):
        t = random_program(s, cfg, REG)
        assert size(t) <= 15


def test_violation_rendering():
    v = Violation(3, "broken", REG.const("p0"))
    assert v.render() == "seed 3: broken\n  p0"


def test_property_checks_pass_on_fixed_seeds():
    assert subject_reduction(0) == []
    assert topology(TopologyGraph.build(3, {(1, 2), (2, 3)})) == []
