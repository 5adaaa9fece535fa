import math

import numpy as np
import pytest

from leakaudit.cohort_etl import (CohortConfig, build_dataset, extract_cohort,
                                  label_los, load_tables)
from leakaudit.tabular import BINARY, NUMERIC, ORIGINAL

from conftest import write_empty_tables

DEMO_CFG = CohortConfig(medication_keys=("heparin", "aspirin"),
                        lab_keys=("glucose", "creatinine"))

# hand-traced through the committed 12-patient tables
EXPECTED_SUBJECTS = {"1", "2", "7", "8", "9", "10", "12"}
EXPECTED_LOS = {"1": 3.2, "2": 9.5, "7": 2.0, "8": 10.0, "9": 7.0, "10": 0.0, "12": 8.0}


@pytest.fixture(scope="module")
def demo_tables(mimic_demo_dir):
    return load_tables(mimic_demo_dir)


@pytest.fixture(scope="module")
def demo_cohort(demo_tables):
    return extract_cohort(demo_tables, DEMO_CFG)


# --- load_tables -------------------------------------------------------

def test_load_empty_tables(tmp_path):
    write_empty_tables(tmp_path)
    tables = load_tables(tmp_path)
    assert tables.admissions == []
    assert tables.icustays == []
    assert tables.diagnoses_icd == []
    assert tables.prescriptions == []
    assert tables.chartevents == []
    assert tables.patients == []


def test_load_admissions_roundtrip(demo_tables):
    assert len(demo_tables.admissions) == 14
    first = demo_tables.admissions[0]
    assert first.subject_id == "1"
    assert first.hadm_id == "101"
    assert first.admission_type == "EMERGENCY"
    assert first.diagnosis == "LUNG CANCER;PNEUMONIA"
    assert first.expire_flag == 0
    assert first.admit_time.year == 2111
    # quoted field with an embedded comma survives parsing
    assert demo_tables.admissions[1].diagnosis == "METASTATIC LUNG CANCER, SMALL CELL"


def test_unparseable_numeric_cell_becomes_missing(demo_tables):
    blank_los = [s for s in demo_tables.icustays if s.subject_id == "12"]
    assert len(blank_los) == 1 and blank_los[0].los is None
    blank_value = [e for e in demo_tables.chartevents
                   if e.subject_id == "1" and e.value_num is None]
    assert len(blank_value) == 1


def test_missing_file_names_the_table(tmp_path):
    write_empty_tables(tmp_path)
    (tmp_path / "ICUSTAYS.csv").unlink()
    with pytest.raises(FileNotFoundError, match="ICUSTAYS"):
        load_tables(tmp_path)


def test_missing_column_names_table_and_column(tmp_path):
    write_empty_tables(tmp_path)
    adm = tmp_path / "ADMISSIONS.csv"
    header = adm.read_text().strip().split(",")
    header.remove("HOSPITAL_EXPIRE_FLAG")
    adm.write_text(",".join(header) + "\n")
    with pytest.raises(ValueError, match="ADMISSIONS: column 'HOSPITAL_EXPIRE_FLAG' not found"):
        load_tables(tmp_path)


def test_schema_override_renames_columns(tmp_path, mimic_demo_dir):
    original = (mimic_demo_dir / "ADMISSIONS.csv").read_text()
    (tmp_path / "adm.csv").write_text(original.replace("HOSPITAL_EXPIRE_FLAG", "DIED"))
    for name in ("ICUSTAYS", "DIAGNOSES_ICD", "PRESCRIPTIONS", "CHARTEVENTS", "PATIENTS"):
        (tmp_path / f"{name}.csv").write_text((mimic_demo_dir / f"{name}.csv").read_text())
    tables = load_tables(tmp_path, {"admissions": {"file": "adm.csv", "expire_flag": "DIED"}})
    assert sum(a.expire_flag for a in tables.admissions) == 2


# --- extract_cohort ----------------------------------------------------

def test_cohort_matches_hand_trace(demo_cohort):
    assert set(demo_cohort.subject_ids()) == EXPECTED_SUBJECTS
    by_id = {r.subject_id: r for r in demo_cohort.rows}
    for sid, los in EXPECTED_LOS.items():
        assert by_id[sid].los == pytest.approx(los)


def test_expired_sole_admission_excluded(demo_cohort):
    assert "3" not in demo_cohort.subject_ids()


def test_no_keyword_excluded(demo_cohort):
    assert "4" not in demo_cohort.subject_ids()


def test_keyword_without_prefix_excluded(demo_cohort):
    # colon cancer: keyword matches, ICD-9 prefix does not
    assert "5" not in demo_cohort.subject_ids()
    # prefix must anchor at the start: 2162 does not qualify
    assert "11" not in demo_cohort.subject_ids()


def test_subject_without_icustay_excluded(demo_cohort):
    assert "6" not in demo_cohort.subject_ids()


def test_expired_admission_removed_but_subject_survives(demo_cohort):
    row = {r.subject_id: r for r in demo_cohort.rows}["7"]
    assert row.last_hadm_id == "701"  # the expired later admission is gone
    assert row.los == pytest.approx(2.0)


def test_latest_admission_and_stay_selected(demo_cohort):
    row = {r.subject_id: r for r in demo_cohort.rows}["8"]
    assert row.last_hadm_id == "802"
    assert row.last_icustay_id == "9803"
    assert row.admission_type == "URGENT"


def test_lowercase_diagnosis_matches(demo_cohort):
    assert "9" in demo_cohort.subject_ids()


def test_los_fallback_from_stay_times(demo_cohort):
    row = {r.subject_id: r for r in demo_cohort.rows}["12"]
    assert row.los == pytest.approx(8.0)


def test_one_row_per_subject_and_subset(demo_tables, demo_cohort):
    ids = demo_cohort.subject_ids()
    assert len(ids) == len(set(ids))
    assert set(ids) <= {a.subject_id for a in demo_tables.admissions}


def test_uppercasing_diagnoses_leaves_cohort_unchanged(demo_tables, demo_cohort):
    import dataclasses
    upper = dataclasses.replace(demo_tables, admissions=[
        dataclasses.replace(a, diagnosis=a.diagnosis.upper()) for a in demo_tables.admissions])
    assert extract_cohort(upper, DEMO_CFG).subject_ids() == demo_cohort.subject_ids()


def test_adding_prefix_never_shrinks_cohort(demo_tables, demo_cohort):
    import dataclasses
    wider = dataclasses.replace(DEMO_CFG, icd9_prefixes=("162", "153"))
    bigger = extract_cohort(demo_tables, wider)
    assert set(demo_cohort.subject_ids()) <= set(bigger.subject_ids())
    assert "5" in bigger.subject_ids()


def test_empty_cohort_is_not_an_error(demo_tables):
    import dataclasses
    none_cfg = dataclasses.replace(DEMO_CFG, diagnosis_keyword="zzznope")
    assert extract_cohort(demo_tables, none_cfg).rows == []


# --- label_los ---------------------------------------------------------

def test_label_boundary_is_short():
    assert label_los(7.0, 7.0) == 0


def test_label_above_threshold_is_long():
    assert label_los(7.5, 7.0) == 1


def test_label_zero():
    assert label_los(0.0, 7.0) == 0


def test_label_negative_rejected():
    with pytest.raises(ValueError):
        label_los(-0.1, 7.0)


# --- build_dataset -----------------------------------------------------

@pytest.fixture(scope="module")
def demo_dataset(demo_cohort, demo_tables):
    return build_dataset(demo_cohort, demo_tables, DEMO_CFG)


def test_feature_columns_and_kinds(demo_dataset):
    assert demo_dataset.column_names == [
        "med_heparin", "med_aspirin", "gender_male", "age_gt_60",
        "admtype_elective", "admtype_emergency", "admtype_urgent",
        "lab_glucose", "lab_creatinine",
    ]
    kinds = {c.name: c.kind for c in demo_dataset.columns}
    assert kinds["lab_glucose"] == NUMERIC
    assert all(k == BINARY for n, k in kinds.items() if not n.startswith("lab_"))


def _row(ds, demo_cohort, sid):
    return ds.x[[r.subject_id for r in demo_cohort.rows].index(sid)]


def test_medication_binary_flags(demo_dataset, demo_cohort):
    med = dict(zip(demo_dataset.column_names, _row(demo_dataset, demo_cohort, "1")))
    assert med["med_heparin"] == 1.0 and med["med_aspirin"] == 1.0
    # suffixed drug names still match the key
    assert _row(demo_dataset, demo_cohort, "8")[0] == 1.0
    # case-insensitive
    assert dict(zip(demo_dataset.column_names, _row(demo_dataset, demo_cohort, "12")))["med_aspirin"] == 1.0
    assert dict(zip(demo_dataset.column_names, _row(demo_dataset, demo_cohort, "2")))["med_heparin"] == 0.0


def test_age_flag_semantics(demo_dataset, demo_cohort):
    cols = demo_dataset.column_names
    age = lambda sid: dict(zip(cols, _row(demo_dataset, demo_cohort, sid)))["age_gt_60"]
    assert age("1") == 1.0   # 61
    assert age("2") == 0.0   # 40
    assert age("9") == 0.0   # exactly 60 is not > 60
    assert age("7") == 1.0   # shifted-dob style age far above the cutoff
    assert age("10") == 0.0  # unknown dob


def test_lab_mean_and_missing(demo_dataset, demo_cohort):
    cols = demo_dataset.column_names
    row1 = dict(zip(cols, _row(demo_dataset, demo_cohort, "1")))
    assert row1["lab_glucose"] == pytest.approx(3.0)  # mean of 2.0 and 4.0
    assert row1["lab_creatinine"] == pytest.approx(1.1)
    row8 = dict(zip(cols, _row(demo_dataset, demo_cohort, "8")))
    assert math.isnan(row8["lab_glucose"])  # no measurements -> missing
    assert row8["lab_creatinine"] == pytest.approx(1.1)


def test_labels_follow_los_threshold(demo_dataset, demo_cohort):
    labels = dict(zip([r.subject_id for r in demo_cohort.rows], demo_dataset.y))
    assert {sid: int(v) for sid, v in labels.items()} == {
        "1": 0, "2": 1, "7": 0, "8": 1, "9": 0, "10": 0, "12": 1}


def test_binary_columns_contain_only_01(demo_dataset):
    for j, col in enumerate(demo_dataset.columns):
        if col.kind == BINARY:
            v = demo_dataset.x[:, j]
            assert np.isin(v[~np.isnan(v)], (0.0, 1.0)).all()
    assert (demo_dataset.provenance == ORIGINAL).all()


def test_duplicate_feature_keys_rejected(demo_cohort, demo_tables):
    import dataclasses
    dup = dataclasses.replace(DEMO_CFG, lab_keys=("glucose", "heparin"))
    with pytest.raises(ValueError, match="duplicate"):
        build_dataset(demo_cohort, demo_tables, dup)
