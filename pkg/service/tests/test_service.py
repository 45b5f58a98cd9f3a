import math

import pytest
from fastapi.testclient import TestClient

from lm_service.app import create_app
from lm_service.schemas import ConditionalResponse, HealthResponse, MaskedTopkResponse

from conftest import WORDS

SENTENCE = "the storyteller could turn any incident into an amusing anecdote".split()


@pytest.fixture(scope="module")
def client(model_dirs):
    app = create_app(*model_dirs, load="eager")
    with TestClient(app) as c:
        yield c


class TestHealth:
    def test_ok_after_load(self, client):
        resp = client.get("/v1/health")
        assert resp.status_code == 200
        body = HealthResponse.model_validate(resp.json())
        assert body.status == "ok"
        assert body.masked_vocabulary_size == len(WORDS)

    def test_loading_before_models_ready(self, model_dirs):
        app = create_app(*model_dirs, load="defer")
        with TestClient(app) as c:
            resp = c.get("/v1/health")
            assert resp.json()["status"] == "loading"
            assert c.post("/v1/conditional",
                          json={"context": [], "target": "dog"}).status_code == 503
            assert c.post("/v1/masked_topk",
                          json={"tokens": ["a"], "mask_index": 0, "k": 5}).status_code == 503

    def test_unknown_route_404(self, client):
        assert client.get("/v1/nope").status_code == 404


class TestMaskedTopk:
    def request(self, client, **overrides):
        body = {"tokens": SENTENCE, "mask_index": 9, "k": 5}
        body.update(overrides)
        return client.post("/v1/masked_topk", json=body)

    def test_schema_round_trip(self, client):
        resp = self.request(client)
        assert resp.status_code == 200
        body = MaskedTopkResponse.model_validate(resp.json())
        assert len(body.candidates) == 5
        assert body.model_identity

    def test_sorted_non_increasing_and_distinct(self, client):
        body = MaskedTopkResponse.model_validate(self.request(client, k=15).json())
        logprobs = [c.logprob for c in body.candidates]
        assert logprobs == sorted(logprobs, reverse=True)
        words = [c.word for c in body.candidates]
        assert len(words) == len(set(words))

    def test_repeated_identical_requests_identical_bodies(self, client):
        first = self.request(client).content
        second = self.request(client).content
        assert first == second

    def test_k_zero_rejected(self, client):
        assert self.request(client, k=0).status_code == 400

    def test_mask_index_out_of_range_rejected(self, client):
        assert self.request(client, mask_index=len(SENTENCE)).status_code == 400

    def test_malformed_body_rejected(self, client):
        resp = client.post("/v1/masked_topk", json={"tokens": "oops"})
        assert resp.status_code == 400

    def test_k_beyond_vocabulary_returns_all_words(self, client):
        body = MaskedTopkResponse.model_validate(self.request(client, k=10_000).json())
        assert len(body.candidates) == len(WORDS)
        assert {c.word for c in body.candidates} == set(WORDS)

    def test_fills_are_alphabetic_words(self, client):
        body = MaskedTopkResponse.model_validate(self.request(client, k=50).json())
        assert all(c.word.isalpha() for c in body.candidates)

    def test_include_words_scored(self, client):
        body = MaskedTopkResponse.model_validate(
            self.request(client, k=1, include_words=["hearse", "zzzz"]).json()
        )
        assert [w.word for w in body.included] == ["hearse", "zzzz"]
        in_vocab, out_of_vocab = body.included
        assert in_vocab.logprob > math.log(1e-12)
        assert out_of_vocab.logprob == pytest.approx(math.log(1e-12))

    def test_full_vocabulary_mass_at_most_one(self, client):
        body = MaskedTopkResponse.model_validate(self.request(client, k=10_000).json())
        total = sum(math.exp(c.logprob) for c in body.candidates)
        assert total <= 1.0 + 1e-9


class TestConditional:
    def request(self, client, context, target):
        return client.post("/v1/conditional", json={"context": context, "target": target})

    def test_schema_round_trip(self, client):
        resp = self.request(client, SENTENCE[:9], "anecdote")
        assert resp.status_code == 200
        body = ConditionalResponse.model_validate(resp.json())
        assert math.isfinite(body.logprob)
        assert body.n_pieces >= 1

    def test_empty_context_is_fine(self, client):
        body = ConditionalResponse.model_validate(self.request(client, [], "dog").json())
        assert math.isfinite(body.logprob)

    def test_deterministic(self, client):
        first = self.request(client, ["an", "amusing"], "anecdote").content
        second = self.request(client, ["an", "amusing"], "anecdote").content
        assert first == second

    def test_conditional_is_a_log_probability(self, client):
        body = ConditionalResponse.model_validate(
            self.request(client, ["the"], "cat").json()
        )
        assert body.logprob <= 0.0

    def test_empty_target_rejected(self, client):
        assert self.request(client, ["the"], "").status_code == 400

    def test_distribution_normalizes_over_vocab(self, client):
        # single-piece vocabulary: conditionals over all words sum to <= 1
        total = 0.0
        for word in WORDS:
            body = ConditionalResponse.model_validate(
                self.request(client, ["the", "quiet"], word).json()
            )
            total += math.exp(body.logprob)
        assert total <= 1.0 + 1e-6
