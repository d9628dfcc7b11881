import math

import pytest

from vortexflow.config import (
    ConfigError,
    parse_config,
    profile_from_string,
    profile_to_string,
    resolved_text,
)
from vortexflow.bc import RotationProfile

MINIMAL = """
[domain]
sigma = 0.1
[grid]
nr = 32
nz = 32
[physics]
nu = 0.01
[bc]
profile = uniform
gamma = 0.3141592653589793e0
[solver]
[output]
"""


def test_minimal_config():
    cfg = parse_config(MINIMAL)
    assert cfg.domain.sigma == 0.1
    assert cfg.domain.R == 4.0  # defaults
    assert cfg.domain.L == 10.0
    assert cfg.physics.nu == 0.01
    assert cfg.bc.profile.gamma == pytest.approx(0.1 * math.pi)
    assert cfg.solver.newton.tol_abs == 1e-10
    assert cfg.output.precision == 17


def test_piecewise_profile():
    text = MINIMAL.replace("profile = uniform\ngamma = 0.3141592653589793e0",
                           "profile = piecewise\npoints = 0:10, 2:10, 10:0")
    cfg = parse_config(text)
    assert cfg.bc.profile.kind == "piecewise"
    assert cfg.bc.profile.breakpoints == ((0.0, 10.0), (2.0, 10.0), (10.0, 0.0))


def test_empty_text_lists_missing_sections():
    with pytest.raises(ConfigError) as err:
        parse_config("")
    msg = str(err.value)
    for s in ("domain", "grid", "physics", "bc", "solver", "output"):
        assert s in msg


def test_unknown_key_rejected():
    with pytest.raises(ConfigError) as err:
        parse_config(MINIMAL + "\n[domain]\nsigm = 0.2\n")
    # configparser treats the duplicate section as an error first; a typo in
    # a fresh config is also caught
    text = MINIMAL.replace("sigma = 0.1", "sigma = 0.1\nsigm = 0.2")
    with pytest.raises(ConfigError) as err2:
        parse_config(text)
    assert "sigm" in str(err2.value)


def test_unknown_section_rejected():
    with pytest.raises(ConfigError):
        parse_config(MINIMAL + "\n[turbulence]\nmodel = none\n")


def test_missing_required_key():
    with pytest.raises(ConfigError) as err:
        parse_config(MINIMAL.replace("nu = 0.01", ""))
    assert "nu" in str(err.value)


def test_type_mismatch():
    with pytest.raises(ConfigError):
        parse_config(MINIMAL.replace("nr = 32", "nr = thirty-two"))


def test_non_monotone_breakpoints():
    text = MINIMAL.replace("profile = uniform\ngamma = 0.3141592653589793e0",
                           "profile = piecewise\npoints = 0:10, 5:10, 2:0")
    with pytest.raises(ConfigError):
        parse_config(text)


def test_order_independent_within_sections():
    text = MINIMAL.replace("nr = 32\nnz = 32", "nz = 32\nnr = 32")
    a = parse_config(MINIMAL)
    b = parse_config(text)
    assert a.nr == b.nr and a.nz == b.nz


def test_hopf_bottom():
    text = MINIMAL.replace("[solver]", "").replace(
        "profile = uniform", "bottom = hopf\nhopf_eps = 0.4\nprofile = uniform"
    ) + "\n[solver]\n"
    cfg = parse_config(text)
    assert cfg.bc.bottom == "hopf"
    assert cfg.bc.hopf.eps == 0.4
    assert cfg.bc.hopf.gamma == pytest.approx(0.1 * math.pi)


def test_resolved_round_trip():
    cfg = parse_config(MINIMAL)
    text = resolved_text(cfg)
    cfg2 = parse_config(text)
    assert cfg2.domain == cfg.domain
    assert cfg2.bc == cfg.bc
    assert cfg2.solver.newton == cfg.solver.newton
    assert cfg2.solver.march == cfg.solver.march


@pytest.mark.parametrize("profile", [
    RotationProfile.uniform(0.1 * math.pi),
    RotationProfile.piecewise((0.0, 10.0), (2.0, 10.0), (10.0, 0.0)),
])
def test_profile_string_round_trip(profile):
    assert profile_from_string(profile_to_string(profile)) == profile
