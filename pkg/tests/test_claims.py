import pytest

from app.claims import ClaimContext, ClaimSpec, Outcome, registered_claims, run_claim, summarize, verify_claims
from app.schemas import ClaimConfig

QUICK_CLAIMS = [
    "bloch-point-sic-fiducial",
    "bound-ordering",
    "canonical-key-phase-invariance",
    "circuit-fig1",
    "clifford-invariance-xi2",
    "closed-form-equivalence",
    "footnote-crossover",
    "gradient-max-magic-point",
    "hessian-max-magic-point",
    "purity-sum-rule",
    "sic-bound-2-4",
    "wh-invariance-concurrence",
]


def test_registry_is_sorted_and_marks_extended_claims():
    ids = [spec.claim_id for spec in registered_claims()]
    assert ids == sorted(ids)
    assert set(QUICK_CLAIMS) <= set(ids)
    extended = {spec.claim_id for spec in registered_claims() if spec.extended}
    assert extended == {"qudit-256-sics"}


def test_quick_claims_pass():
    reports = verify_claims(ClaimConfig(), only=QUICK_CLAIMS)
    assert [r.claim_id for r in reports] == QUICK_CLAIMS
    failed = [(r.claim_id, r.note) for r in reports if not r.passed]
    assert failed == []
    assert summarize(reports) == (len(QUICK_CLAIMS), 0)


def test_extended_claims_are_skipped_by_default():
    assert verify_claims(ClaimConfig(), only=["qudit-256-sics"]) == []


def test_structure_claims_pass(artifacts, monkeypatch):
    monkeypatch.setattr(ClaimContext, "artifacts", artifacts)
    only = [
        "clifford-orbit-480",
        "concurrence-magic",
        "concurrence-pairing-rule",
        "concurrence-stabilizer",
        "five-mub-pairing",
        "magic-mub-fiducials",
        "magic-wh-orbits-30",
        "max-concurrence-magic",
        "stabilizer-count-60",
        "stabilizer-families-3",
        "stabilizer-wh-orbits-15",
        "stabilizer-zero-magic",
    ]
    reports = verify_claims(ClaimConfig(), only=only)
    assert [(r.claim_id, r.passed) for r in reports] == [(claim_id, True) for claim_id in only]


def test_exploding_claim_is_reported_as_failure():
    def boom(ctx):
        raise ZeroDivisionError("sin datos")

    report = run_claim(ClaimSpec("boom", "explota", "TRIVIAL", False, boom), ClaimContext(ClaimConfig()))
    assert not report.passed
    assert report.note == "ZeroDivisionError: sin datos"


def test_comparisons():
    ctx = ClaimContext(ClaimConfig())
    spec = lambda outcome: ClaimSpec("c", "c", "TRIVIAL", False, lambda _: outcome)  # noqa: E731
    assert run_claim(spec(Outcome(target=1.0, computed=1.0 + 1e-12, tolerance=1e-9)), ctx).passed
    assert not run_claim(spec(Outcome(target=3, computed=4, comparison="exact")), ctx).passed
    assert run_claim(spec(Outcome(target=0.0, computed=1e-3, comparison="gt")), ctx).passed
    assert not run_claim(spec(Outcome(target=1.0, computed=1.0, tolerance=1.0, extra_ok=False)), ctx).passed


@pytest.mark.slow
def test_all_claims_pass():
    reports = verify_claims(ClaimConfig(workers=1))
    failed = [(r.claim_id, r.note) for r in reports if not r.passed]
    assert failed == []
