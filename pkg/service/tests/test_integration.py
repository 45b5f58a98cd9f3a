"""End-to-end: the decomposition pipeline driving this service over HTTP."""

import subprocess
import sys
import threading
import time

import pytest
import uvicorn

surprisal_split = pytest.importorskip(
    "surprisal_split", reason="integration needs the pipeline package installed"
)

from surprisal_split import NoiseParams, RemoteScorer, decompose  # noqa: E402

from lm_service.app import create_app  # noqa: E402

SENTENCE = "the storyteller could turn any incident into an amusing anecdote".split()


@pytest.fixture(scope="module")
def service_url(model_dirs):
    app = create_app(*model_dirs, load="eager")
    config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 15
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("uvicorn did not start")
        time.sleep(0.05)
    port = server.servers[0].sockets[0].getsockname()[1]
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)


def test_remote_scorer_round_trip(service_url):
    scorer = RemoteScorer(service_url)
    desc = scorer.descriptor
    assert desc.kind == "remote" and desc.vocabulary_size > 0
    top = scorer.masked_topk(SENTENCE, 9, 5)
    assert len(top) == 5
    assert all(x.logprob >= y.logprob for x, y in zip(top, top[1:]))
    assert scorer.conditional_logprob(SENTENCE[:9], "anecdote") <= 0.0


def test_decomposition_identity_over_http(service_url):
    scorer = RemoteScorer(service_url)
    for lam in (0.0, 4.0, 1e6):
        dec = decompose(SENTENCE, 9, scorer, NoiseParams(lam=lam, top_k=10))
        assert abs(dec.heuristic_A + dec.discrepancy_B - dec.surprisal_S) <= 1e-9
        assert dec.heuristic_A >= 0.0
    dec_inf = decompose(SENTENCE, 9, scorer, NoiseParams(lam=1e6, top_k=10))
    assert abs(dec_inf.discrepancy_B) <= 1e-6


def test_cli_decompose_against_live_service(service_url, tmp_path):
    stimuli = tmp_path / "stimuli.csv"
    stimuli.write_text(
        "item_id,condition,sentence,target_index\n"
        f"17,Control,{' '.join(SENTENCE)},9\n"
        f"17,SemCrit,{' '.join(SENTENCE[:9] + ['antidote'])},9\n"
    )
    out = tmp_path / "dec.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "surprisal_split", "decompose",
         "--scorer", "remote", "--endpoint", service_url,
         "--stimuli", str(stimuli), "--lambda", "4", "--top-k", "8",
         "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert len(lines) == 3  # header + 2 rows
