import numpy as np
import pytest

from surprisal_split.analysis import (
    fit_erp_table,
    fit_ols,
    load_amplitudes,
    predictor_join,
)
from surprisal_split.decomposition import Decomposition
from surprisal_split.errors import (
    DataError,
    DegeneratePredictorError,
    EmptyJoinError,
    SchemaError,
)


def ols_oracle(x, y):
    """Matrix normal equations, independent of the closed-form path."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    design = np.column_stack([np.ones(len(x)), x])
    beta = np.linalg.solve(design.T @ design, design.T @ y)
    resid = y - design @ beta
    sigma2 = float(resid @ resid) / (len(x) - 2)
    cov = sigma2 * np.linalg.inv(design.T @ design)
    se = float(np.sqrt(cov[1, 1]))
    return float(beta[1]), float(beta[0]), se


def make_dec(item, cond, s=1.0, a=0.5, b=0.5):
    return Decomposition(item, cond, s, a, b, 0.0, 1.0, 1)


class TestLoadAmplitudes:
    HEADER = "item_id,subject_id,condition,n400_amp,p600_amp\n"

    def test_well_formed(self, tmp_path):
        path = tmp_path / "a.csv"
        path.write_text(self.HEADER + "1,s1,Control,-2.5,1.0\n1,s2,Control,-1.0,0.5\n"
                                      "2,s1,Sem,-4.0,2.0\n")
        records = load_amplitudes(path)
        assert len(records) == 3
        assert records[0].n400_amp == -2.5

    def test_duplicate_key_names_triple(self, tmp_path):
        path = tmp_path / "a.csv"
        path.write_text(self.HEADER + "1,s1,Control,-2.5,1.0\n1,s1,Control,-1.0,0.5\n")
        with pytest.raises(DataError, match=r"\('1', 's1', 'Control'\)"):
            load_amplitudes(path)

    def test_missing_column_named(self, tmp_path):
        path = tmp_path / "a.csv"
        path.write_text("item_id,subject_id,condition,n400_amp\n1,s1,Control,-2.5\n")
        with pytest.raises(SchemaError, match="p600_amp"):
            load_amplitudes(path)


class TestFitOls:
    def test_exact_line(self):
        fit = fit_ols([(0, 0), (1, 2), (2, 4)])
        assert fit.slope == pytest.approx(2.0)
        assert fit.intercept == pytest.approx(0.0)
        assert fit.std_error == pytest.approx(0.0)

    def test_degenerate_predictor(self):
        with pytest.raises(DegeneratePredictorError):
            fit_ols([(1, 0), (1, 2), (1, 5)])

    def test_too_few_points(self):
        with pytest.raises(DataError):
            fit_ols([(0, 0), (1, 1)])

    def test_matches_normal_equations_oracle(self):
        rng = np.random.default_rng(20240817)
        for _ in range(100):
            n = rng.integers(5, 60)
            x = rng.normal(size=n)
            y = 3.0 * x + rng.normal(scale=0.7, size=n)
            fit = fit_ols(list(zip(x, y)))
            slope, intercept, se = ols_oracle(x, y)
            assert fit.slope == pytest.approx(slope, abs=1e-9)
            assert fit.intercept == pytest.approx(intercept, abs=1e-9)
            assert fit.std_error == pytest.approx(se, abs=1e-9)
            assert fit.t_stat == pytest.approx(slope / se, abs=1e-7)

    def test_slope_invariant_to_predictor_shift(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=30)
        y = 2.0 * x + rng.normal(size=30)
        f1 = fit_ols(list(zip(x, y)))
        f2 = fit_ols(list(zip(x + 41.0, y)))
        assert f1.slope == pytest.approx(f2.slope, abs=1e-9)

    def test_standardized_slope_invariant_to_affine_rescale(self):
        rng = np.random.default_rng(4)
        x = rng.normal(size=40)
        y = -1.5 * x + rng.normal(size=40)
        f1 = fit_ols(list(zip(x, y)), standardize=True)
        f2 = fit_ols(list(zip(5.0 * x + 2.0, 0.25 * y - 7.0)), standardize=True)
        assert f1.slope == pytest.approx(f2.slope, abs=1e-9)
        assert f1.t_stat == pytest.approx(f2.t_stat, abs=1e-7)

    def test_standardized_slope_is_correlation(self):
        rng = np.random.default_rng(5)
        x = rng.normal(size=50)
        y = 0.8 * x + rng.normal(size=50)
        fit = fit_ols(list(zip(x, y)), standardize=True)
        assert fit.slope == pytest.approx(float(np.corrcoef(x, y)[0, 1]), abs=1e-9)
        assert fit.standardized


class TestPredictorJoin:
    def test_disjoint_ids_rejected(self):
        decs = [make_dec("1", "Control")]
        from surprisal_split.analysis import AmplitudeRecord
        amps = [AmplitudeRecord("9", "s1", "Control", -1.0, 1.0)]
        with pytest.raises(EmptyJoinError):
            predictor_join(decs, amps, "n400", "A")

    def test_full_overlap_cardinality(self):
        from surprisal_split.analysis import AmplitudeRecord
        items, conds, subjects = ["1", "2", "3"], ["Control", "Sem"], ["s1", "s2"]
        decs = [make_dec(i, c) for i in items for c in conds]
        amps = [AmplitudeRecord(i, s, c, -1.0, 1.0)
                for i in items for c in conds for s in subjects]
        join = predictor_join(decs, amps, "p600", "B")
        assert join.n_matched == len(items) * len(conds) * len(subjects)
        assert join.n_unmatched == 0

    def test_unmatched_counted(self):
        from surprisal_split.analysis import AmplitudeRecord
        decs = [make_dec("1", "Control")]
        amps = [AmplitudeRecord("1", "s1", "Control", -1.0, 1.0),
                AmplitudeRecord("2", "s1", "Control", -1.0, 1.0)]
        join = predictor_join(decs, amps, "n400", "S")
        assert join.n_matched == 1 and join.n_unmatched == 1


def test_fit_erp_table_has_four_cells():
    from surprisal_split.analysis import AmplitudeRecord
    rng = np.random.default_rng(6)
    decs, amps = [], []
    for i in range(12):
        a, b = rng.uniform(1, 8), rng.uniform(0, 4)
        decs.append(make_dec(str(i), "Control", s=a + b, a=a, b=b))
        for subj in ("s1", "s2"):
            amps.append(AmplitudeRecord(
                str(i), subj, "Control",
                -0.6 * a + rng.normal(scale=0.1),
                0.7 * b + rng.normal(scale=0.1),
            ))
    fits = fit_erp_table(decs, amps)
    cells = {(f.predictor, f.response) for f in fits}
    assert cells == {("A", "n400"), ("S", "n400"), ("B", "p600"), ("S", "p600")}
    by_cell = {(f.predictor, f.response): f for f in fits}
    assert by_cell[("A", "n400")].slope < 0
    assert by_cell[("B", "p600")].slope > 0
