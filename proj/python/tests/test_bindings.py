# Copyright 2026 The ecr Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import os
import pathlib

import pytest

import ecr

DATA = pathlib.Path(os.environ.get("ECR_DATA_DIR", pathlib.Path(__file__).resolve().parents[2] / "data"))


def read(name):
    return (DATA / name).read_text()


def test_parse_and_pretty_print_round_trip():
    d = ecr.parse_domain(read("circuit.ec"))
    assert d.sorts == ["switch", "relay", "light"]
    again = ecr.parse_domain(d.pretty())
    assert again == d
    assert ecr.pretty_print(read("coin.ec")) == ecr.parse_domain(read("coin.ec")).pretty()


def test_parse_error_carries_code():
    with pytest.raises(ecr.Error) as info:
        ecr.parse_domain("fluent: A\n")
    assert info.value.code == "ParseError"


def test_circuit_alternates():
    pool = ecr.Pool(read("circuit.ec"))
    pool.run(12)
    lit = "".join("T" if pool.holds("Lit(L)", t) else "F" for t in range(13))
    assert lit == "FFTTFFTTFFTTF"


def test_coin_branches_and_prunes():
    pool = ecr.Pool(read("coin.ec"))
    pool.tick()
    assert len(pool.model_ids) == 2
    assert pool.holds("Heads", 1, "credulous")
    assert not pool.holds("Heads", 1, "skeptical")
    pool.submit("HoldsAt(Heads, 2)")
    report = pool.tick()
    assert len(pool.model_ids) == 1
    assert len(report["eliminated"]) == 1


def test_semi_destructive_mode():
    pool = ecr.Pool(read("circuit.ec"), kb_mode="semi-destructive")
    pool.run(3)
    with pytest.raises(ecr.Error) as info:
        pool.holds("Lit(L)", 1)
    assert info.value.code == "HistoryUnavailable"


def test_epistemic_knowledge():
    pool = ecr.Pool(read("circuit_epistemic.ec"), mode="epistemic")
    assert pool.knows("Closed(S3)") == "unknown"
    pool.submit("HoldsAt(Closed(S3), 1)")
    pool.run(2)
    assert pool.knows("Activated(R)") == "known-true"


def test_network_inference():
    net = ecr.Network.from_file(str(DATA / "networks" / "TakeShower.xml"))
    assert net.activity == "TakeShower"
    assert net.target == "tsh"
    p = net.infer({"gob": True, "tb": False})
    assert 0.5 < p < 1.0
    # Marginalize by brute force over the unobserved nodes.
    free = [l for l in net.labels if l not in ("gob", "tb")]
    num = den = 0.0
    for mask in range(1 << len(free)):
        a = {"gob": True, "tb": False}
        a.update({l: bool(mask >> i & 1) for i, l in enumerate(free)})
        j = net.joint(a)
        den += j
        if a["tsh"]:
            num += j
    assert p == pytest.approx(num / den, abs=1e-12)


def test_service_api():
    svc = ecr.Service()
    status, body = ecr.request(svc, "POST", "/sessions", {"domainSource": read("circuit.ec")})
    assert status == 201
    base = "/sessions/" + body["id"]
    status, body = ecr.request(svc, "POST", base + "/events", {"statement": "Happens(Open(S2), -1)"})
    assert status == 202
    status, body = ecr.request(svc, "POST", base + "/tick", {})
    assert status == 200
    assert body["reports"][0]["events"] == ["Open(S2)"]
    status, body = ecr.request(svc, "GET", base + "/models")
    assert [m["id"] for m in body["models"]] == ["m0"]
    status, body = ecr.request(svc, "GET", "/sessions/missing")
    assert status == 404
    assert body["error"] == "SessionNotFound"
    status, body = ecr.request(svc, "DELETE", base)
    assert status == 204 and body is None


def test_hybrid_session_over_api():
    svc = ecr.Service()
    status, body = ecr.request(svc, "POST", "/sessions", {
        "mode": "hybrid",
        "domain": str(DATA / "home"),
        "networks": str(DATA / "networks"),
        "threshold": 0.5,
    })
    assert status == 201, body
    base = "/sessions/" + body["id"]
    for ev in ("Happens(DoorOpens(Ned, HallBedroom, 0), -1)", "Happens(DoorOpens(Ned, HallBathroom, 100), -1)"):
        status, report = ecr.request(svc, "POST", base + "/cycle", {"events": [ev]})
        assert status == 200, report
    assert report["end"] == 6
    assert {p["explanation"] for p in report["poss"]} == {"TS2:Morning", "TS8:NoShowerYet", "BT3:Morning"}
    status, acts = ecr.request(svc, "GET", base + "/activities")
    assert [r["activity"] for r in acts["recognized"]] == ["TakeShower"]
