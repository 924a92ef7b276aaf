"""Ingestion and persistence tests: discretization, priors, round trips."""

import io
import json

import numpy as np
import pandas as pd
import pytest

from dfalloc.data_io import (
    ReferenceRange,
    SchemaError,
    discretize,
    load_prior_knowledge,
    load_ranges,
    read_chain,
    read_summary,
    write_chain,
    write_summary,
)
from dfalloc.model import ModelConfig, ObservationSet, PriorKnowledge
from dfalloc.sampler import SamplerConfig, run_mcmc
from dfalloc.summarize import build_summary


class TestReferenceRange:
    def test_ternary_coding(self):
        r = ReferenceRange("glucose", "ternary", lower=3.9, upper=6.1)
        codes = r.code(np.array([2.0, 3.9, 5.0, 6.1, 9.0]))
        assert list(codes) == [-1, 0, 0, 0, 1]

    def test_binary_coding_two_sided(self):
        r = ReferenceRange("alt", "binary", lower=10.0, upper=40.0)
        codes = r.code(np.array([5.0, 10.0, 25.0, 40.0, 90.0]))
        assert list(codes) == [1, 0, 0, 0, 1]

    def test_binary_one_sided(self):
        r = ReferenceRange("afp", "binary", upper=7.0)
        assert list(r.code(np.array([1.0, 7.0, 8.0]))) == [0, 0, 1]

    def test_exclusive_boundaries(self):
        r = ReferenceRange("x", "ternary", lower=0.0, upper=1.0, inclusive=False)
        assert list(r.code(np.array([0.0, 0.5, 1.0]))) == [-1, 0, 1]

    def test_ternary_needs_both_bounds(self):
        with pytest.raises(SchemaError):
            ReferenceRange("x", "ternary", lower=1.0)

    def test_bound_order(self):
        with pytest.raises(SchemaError):
            ReferenceRange("x", "binary", lower=2.0, upper=1.0)

    def test_unknown_kind(self):
        with pytest.raises(SchemaError):
            ReferenceRange("x", "quaternary", lower=0.0, upper=1.0)


class TestDiscretize:
    def frame(self):
        return pd.DataFrame({
            "patient_id": ["a", "b"],
            "alt": [50.0, 20.0],
            "glucose": [7.0, 3.0],
        })

    def ranges(self):
        return [ReferenceRange("alt", "binary", lower=10, upper=40),
                ReferenceRange("glucose", "ternary", lower=3.9, upper=6.1)]

    def test_basic(self):
        obs = discretize(self.frame(), self.ranges())
        assert obs.patient_ids == ["a", "b"]
        assert obs.symptom_names == ["alt", "glucose"]
        assert obs.Z.tolist() == [[1], [0]]
        assert obs.Y.tolist() == [[1], [-1]]

    def test_missing_column_named(self):
        ranges = self.ranges() + [ReferenceRange("bun", "binary", upper=8)]
        with pytest.raises(SchemaError, match="'bun'"):
            discretize(self.frame(), ranges)

    def test_non_numeric_cell_names_column_and_patient(self):
        frame = self.frame()
        frame["glucose"] = frame["glucose"].astype(object)
        frame.loc[1, "glucose"] = "oops"
        with pytest.raises(SchemaError, match="'glucose'.*'b'"):
            discretize(frame, self.ranges())


class TestPriorLoader:
    def obs(self):
        return ObservationSet(
            Z=np.zeros((3, 2), dtype=np.int8),
            Y=np.zeros((3, 2), dtype=np.int8),
            symptom_names=["alt", "ast", "glucose", "bun"],
            patient_ids=["a", "b", "c"],
        )

    def test_full_document(self):
        doc = {"diseases": [
            {"name": "liver", "patients": ["a", "c"],
             "symptoms": {"alt": 1, "glucose": 1}},
            {"name": "kidney", "symptoms": {"bun": 1},
             "pin_remaining_zero": True},
        ]}
        pk = load_prior_knowledge(doc, self.obs())
        assert pk.K0 == 2
        assert pk.disease_names == ["liver", "kidney"]
        assert pk.pinned_A[0].tolist() == [1, 0, 1]
        assert pk.pinned_A[1] is None
        assert pk.pinned_B[0].tolist() == [1, 0]
        assert pk.pinned_B_mask[0].tolist() == [True, False]
        assert pk.pinned_C_mask[1].all() and pk.pinned_B_mask[1].all()
        assert pk.pinned_C[1].tolist() == [0, 1]

    def test_unknown_patient(self):
        doc = {"diseases": [{"name": "x", "patients": ["zz"]}]}
        with pytest.raises(SchemaError, match="'zz'"):
            load_prior_knowledge(doc, self.obs())

    def test_unknown_symptom(self):
        doc = {"diseases": [{"name": "x", "symptoms": {"nope": 1}}]}
        with pytest.raises(SchemaError, match="'nope'"):
            load_prior_knowledge(doc, self.obs())

    def test_bad_pin_values(self):
        with pytest.raises(SchemaError):
            load_prior_knowledge(
                {"diseases": [{"name": "x", "symptoms": {"alt": -1}}]}, self.obs())
        with pytest.raises(SchemaError):
            load_prior_knowledge(
                {"diseases": [{"name": "x", "symptoms": {"glucose": 2}}]}, self.obs())

    def test_duplicate_disease_names(self):
        doc = {"diseases": [{"name": "x"}, {"name": "x"}]}
        with pytest.raises(ValueError):
            load_prior_knowledge(doc, self.obs())


class TestRangesLoader:
    def test_loads_items(self):
        doc = {"items": [{"name": "alt", "kind": "binary", "upper": 40}]}
        ranges = load_ranges(doc)
        assert len(ranges) == 1 and ranges[0].name == "alt"

    def test_requires_items_list(self):
        with pytest.raises(SchemaError):
            load_ranges({"nope": []})


def small_chain(seed=0):
    rng = np.random.default_rng(seed)
    obs = ObservationSet(
        Z=(rng.random((6, 3)) < 0.5).astype(np.int8),
        Y=rng.choice(np.array([-1, 0, 1], dtype=np.int8), size=(6, 2)),
    )
    prior = PriorKnowledge(K0=1, pinned_A=[np.ones(6, dtype=np.int8)],
                           pinned_B=[np.array([1, 0, 0], dtype=np.int8)],
                           pinned_C=[np.array([1, 0], dtype=np.int8)])
    cfg = SamplerConfig(iterations=120, burn_in=40, thin=4, seed=seed)
    return run_mcmc(obs, prior, ModelConfig(), cfg), obs


class TestChainRoundTrip:
    def test_bit_exact(self):
        chain, _ = small_chain()
        buf = io.StringIO()
        write_chain(chain, buf)
        loaded = read_chain(io.StringIO(buf.getvalue()))
        assert loaded.seed == chain.seed
        assert loaded.K0 == chain.K0
        assert loaded.Ks == chain.Ks
        assert loaded.iters == chain.iters
        assert loaded.logliks == chain.logliks  # bit-exact floats
        for a, b in zip(loaded.snapshots, chain.snapshots):
            assert (a.A == b.A).all() and (a.B == b.B).all() and (a.C == b.C).all()
            assert (a.W == b.W).all()  # exact, not approximate
            assert (a.zeta == b.zeta).all()
            assert a.rho == b.rho and (a.pi == b.pi).all()
            assert (a.fixed_A == b.fixed_A).all()
            assert (a.fixed_B == b.fixed_B).all()
        # second round trip is byte-identical
        buf2 = io.StringIO()
        write_chain(loaded, buf2)
        assert buf2.getvalue() == buf.getvalue()

    def test_rejects_wrong_schema(self):
        with pytest.raises(SchemaError):
            read_chain(io.StringIO(json.dumps({"schema": "other/1"}) + "\n"))

    def test_rejects_empty_file(self):
        with pytest.raises(SchemaError):
            read_chain(io.StringIO(""))

    def test_rejects_dimension_mismatch(self):
        chain, _ = small_chain()
        buf = io.StringIO()
        write_chain(chain, buf)
        lines = buf.getvalue().splitlines()
        rec = json.loads(lines[1])
        rec["A"] = rec["A"][:-1]  # drop a row
        bad = "\n".join([lines[0], json.dumps(rec)])
        with pytest.raises(SchemaError):
            read_chain(io.StringIO(bad))


class TestSummaryRoundTrip:
    def test_full_round_trip(self):
        chain, obs = small_chain(seed=1)
        summary = build_summary(chain, obs)
        buf = io.StringIO()
        write_summary(summary, buf)
        loaded = read_summary(io.StringIO(buf.getvalue()))
        assert loaded.K_hat == summary.K_hat
        assert (loaded.A_hat == summary.A_hat).all()
        assert (loaded.edge_probs == summary.edge_probs).all()
        assert (loaded.patient_probs == summary.patient_probs).all()
        assert loaded.K_pmf == summary.K_pmf
        assert loaded.disease_names == summary.disease_names
        assert loaded.symptom_names == summary.symptom_names
        assert (loaded.Z == summary.Z).all() and (loaded.Y == summary.Y).all()
        assert (loaded.fixed_A == summary.fixed_A).all()

    def test_rejects_wrong_schema(self):
        with pytest.raises(SchemaError):
            read_summary(io.StringIO(json.dumps({"schema": "bogus"})))
