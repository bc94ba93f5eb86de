"""Config parsing, validation, geometry queries and transforms."""

import json

import pytest

from flexmem import device as dv
from flexmem.device import (config_to_dict, electrodes_for, load_config,
                            mirror_config, remove_arms, remove_wings,
                            serialize, validate, width_at)
from flexmem.errors import DomainError, InvalidConfig, InvalidDocument


@pytest.fixture(scope="module")
def default_text():
    with open(dv.default_config_path()) as fh:
        return fh.read()


class TestLoadConfig:
    def test_shipped_default(self, default_text):
        cfg = load_config(default_text)
        assert cfg.profile.length == 600e-6
        assert cfg.profile.thickness == 2e-6
        assert width_at(cfg.profile, cfg.profile.length / 2) == 320e-6
        assert all(e.gap == 3e-6 for e in cfg.electrodes)
        assert len(cfg.pillars) == 3

    def test_missing_adhesion_defaults_to_zero(self, default_text):
        doc = json.loads(default_text)
        for c in doc["contacts"]:
            c.pop("adhesion_pressure", None)
        cfg = dv.config_from_dict(doc)
        assert all(c.adhesion_pressure == 0.0 for c in cfg.contacts)

    def test_negative_gap_names_offending_key(self, default_text):
        doc = json.loads(default_text)
        doc["electrodes"][0]["gap"] = -3e-6
        with pytest.raises(InvalidConfig) as exc:
            dv.config_from_dict(doc)
        assert any(v.path == "electrodes[0].gap" for v in exc.value.violations)

    def test_unknown_key_rejected(self, default_text):
        doc = json.loads(default_text)
        doc["fabrication"] = {}
        with pytest.raises(InvalidDocument, match="fabrication"):
            dv.config_from_dict(doc)

    def test_unknown_nested_key_rejected(self, default_text):
        doc = json.loads(default_text)
        doc["material"]["hardness"] = 1.0
        with pytest.raises(InvalidDocument, match="hardness"):
            dv.config_from_dict(doc)

    def test_parse_failure(self):
        with pytest.raises(InvalidDocument):
            load_config("{not json")

    def test_round_trip(self, default_text):
        cfg = load_config(default_text)
        again = load_config(serialize(cfg))
        assert again == cfg


class TestValidate:
    def test_default_is_valid(self, default_cfg):
        assert validate(default_cfg) == []

    def test_two_pillars_flagged(self, default_cfg):
        import dataclasses
        cfg = dataclasses.replace(default_cfg, pillars=default_cfg.pillars[:2])
        violations = validate(cfg)
        assert any("pillars" in v.path and "3" in v.message
                   for v in violations)

    def test_overlapping_electrodes_flagged(self, default_cfg):
        import dataclasses
        els = list(default_cfg.electrodes)
        els[2] = dataclasses.replace(els[2], x_start=els[1].x_end - 10e-6)
        cfg = dataclasses.replace(default_cfg, electrodes=tuple(els))
        violations = validate(cfg)
        assert any("E2" in v.message and "E3" in v.message for v in violations)

    def test_validate_returns_all_violations(self, default_cfg):
        import dataclasses
        els = list(default_cfg.electrodes)
        els[0] = dataclasses.replace(els[0], gap=-1e-6)
        cfg = dataclasses.replace(
            default_cfg, pillars=default_cfg.pillars[:1],
            electrodes=tuple(els))
        violations = validate(cfg)
        assert len(violations) >= 2  # never stops at the first


class TestWidthAt:
    def test_default_midspan(self, default_cfg):
        assert width_at(default_cfg.profile, 300e-6) == 320e-6

    def test_single_segment_everywhere(self):
        prof = dv.MembraneProfile(600e-6, 2e-6,
                                  (dv.Segment(0.0, 600e-6, 100e-6),))
        for x in (0.0, 1e-6, 300e-6, 600e-6):
            assert width_at(prof, x) == 100e-6

    def test_arm_width_from_shipped_default(self, default_cfg):
        arms = dv.arm_segments(default_cfg.profile)
        assert arms, "default profile carries arm segments"
        seg = default_cfg.profile.segments[arms[0]]
        x = 0.5 * (seg.x_start + seg.x_end)
        assert width_at(default_cfg.profile, x) == seg.width
        assert seg.width < 320e-6

    def test_right_segment_wins_at_joint(self):
        prof = dv.MembraneProfile(
            10e-6, 2e-6,
            (dv.Segment(0.0, 5e-6, 1e-6), dv.Segment(5e-6, 10e-6, 2e-6)))
        assert width_at(prof, 5e-6) == 2e-6
        assert width_at(prof, 10e-6) == 2e-6  # x = L: last segment

    def test_out_of_domain(self, default_cfg):
        with pytest.raises(DomainError):
            width_at(default_cfg.profile, -1e-9)
        with pytest.raises(DomainError):
            width_at(default_cfg.profile, 600.1e-6)

    def test_piecewise_integral_matches_segment_areas(self, default_cfg):
        from scipy.integrate import quad
        prof = default_cfg.profile
        total, _ = quad(lambda x: width_at(prof, x), 0.0, prof.length,
                        points=[s.x_start for s in prof.segments],
                        limit=200)
        exact = sum(s.width * (s.x_end - s.x_start) for s in prof.segments)
        assert abs(total - exact) / exact < 1e-12


class TestStates:
    def test_rest_empty(self, default_cfg):
        assert electrodes_for(default_cfg.states, dv.REST) == ()

    def test_restore_external_pair(self, default_cfg):
        assert electrodes_for(default_cfg.states, dv.RESTORE) == ("E1", "E4")

    def test_odd_default_grouping(self, default_cfg):
        assert electrodes_for(default_cfg.states, dv.ODD) == ("E1", "E3")

    def test_unknown_state(self, default_cfg):
        with pytest.raises(ValueError):
            electrodes_for(default_cfg.states, "standby")


class TestTransforms:
    def test_mirror_swaps_odd_even(self, default_cfg):
        m = mirror_config(default_cfg)
        assert validate(m) == []
        assert set(m.states.odd) == set(default_cfg.states.even)
        assert set(m.states.even) == set(default_cfg.states.odd)
        assert set(m.states.restore) == {"E1", "E4"}

    def test_mirror_involution(self, default_cfg):
        mm = mirror_config(mirror_config(default_cfg))

        def flatten(obj, prefix=""):
            if isinstance(obj, dict):
                for k, v in obj.items():
                    yield from flatten(v, f"{prefix}.{k}")
            elif isinstance(obj, list):
                for i, v in enumerate(obj):
                    yield from flatten(v, f"{prefix}[{i}]")
            else:
                yield prefix, obj

        a = dict(flatten(config_to_dict(mm)))
        b = dict(flatten(config_to_dict(default_cfg)))
        assert a.keys() == b.keys()
        for key, va in a.items():
            vb = b[key]
            if isinstance(va, float):
                assert va == pytest.approx(vb, rel=1e-12, abs=1e-18), key
            else:
                assert va == vb, key

    def test_remove_arms_widens_to_body(self, default_cfg):
        cfg = remove_arms(default_cfg)
        assert dv.arm_segments(cfg.profile) == ()
        assert validate(cfg) == []

    def test_remove_wings_narrows_to_body(self, default_cfg):
        cfg = remove_wings(default_cfg)
        assert dv.wing_segments(cfg.profile) == ()
        assert validate(cfg) == []
