import math

import numpy as np
import pytest

from sparserec.harness import campaigns as cp


def test_small_thresholding_campaigns():
    for fn in (cp.lemma_2_1_campaign, cp.lemma_2_2_campaign):
        res = fn(500, 3)
        assert res.ok and res.trials == 500 and res.failed == 0
    r = cp.lemma_2_2_campaign(500, 3)
    assert 0 < r.max_ratio <= 1 + 1e-10


def test_campaigns_are_replayable():
    a = cp.lemma_3_1_campaign(300, 11).to_dict()
    b = cp.lemma_3_1_campaign(300, 11).to_dict()
    assert a == b and a["ok"]
    assert cp.lemma_3_1_campaign(300, 12).to_dict()["min_slack"] != a["min_slack"]


def test_projection_campaigns_small():
    r2 = cp.lemma_3_2_campaign(40, 5)
    assert r2.ok and r2.trials == 80
    r3 = cp.lemma_3_3_campaign(40, 5)
    assert r3.ok and r3.notes["instances"] == 40


@pytest.mark.parametrize("part", ["i", "ii", "iii"])
def test_rip_campaigns_small(part):
    res = cp.rip_lemma_campaign(part, 300, 2)
    assert res.ok and res.trials == 300
    with pytest.raises(ValueError):
        cp.rip_lemma_campaign("iv", 1, 2)


def test_theorem_campaign_small():
    res = cp.theorem_campaign("iht", 6, 4)
    assert res.ok and res.notes["certified"] == 6
    assert res.notes["noiseless_runs_slow"] == 0


def test_counterexamples_are_recorded():
    res = cp.CampaignResult("demo", 0, {})
    from sparserec.core import BoundCheck

    res.add(BoundCheck.from_sides(2.0, 1.0, "x"), lambda: {"input": 1})
    res.add(BoundCheck.from_sides(0.5, 1.0, "x"))
    res.add(BoundCheck.from_sides(9.0, 1.0, "x", vacuous=True))
    d = res.to_dict()
    assert (d["passed"], d["failed"], d["vacuous"]) == (1, 1, 1)
    assert not d["ok"] and d["counterexamples"][0]["inputs"] == {"input": 1}
    assert math.isclose(d["min_slack"], -1.0)


def test_run_suite_names():
    results = cp.run_suite("all", 20, 1)
    assert [r.name for r in results] == ["lemma-2.1", "lemma-2.2", "lemma-3.1", "lemma-3.2", "lemma-3.3"]
    assert all(r.ok for r in results)
