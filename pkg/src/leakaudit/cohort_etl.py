"""MIMIC-shaped CSV ingestion and lung-cancer ICU cohort extraction.

The extraction applies four rules to the relational tables:

1. drop admissions whose expire flag is 1;
2. drop subjects whose remaining admission diagnosis text never contains
   the diagnosis keyword (case-insensitive), and subjects lacking an
   admission id or an ICU stay;
3. keep only subjects with some ICD-9 code starting with a configured
   prefix (default ``162``, lung cancer);
4. build one feature row per surviving subject from their latest
   admission / ICU stay: binary medication indicators, gender, an
   age-over-cutoff flag, a one-hot admission type, and per-lab means.

The per-stay length of stay, binarized at a configurable threshold,
is the prediction target.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

import numpy as np

from .tabular import BINARY, NUMERIC, ORIGINAL, Column, Dataset

# Canonical MIMIC-III file and column names.  Every entry can be overridden
# through the run-config schema map (e.g. ``schema.admissions.expire_flag``).
DEFAULT_SCHEMA = {
    "admissions": {
        "file": "ADMISSIONS.csv",
        "subject_id": "SUBJECT_ID",
        "hadm_id": "HADM_ID",
        "admit_time": "ADMITTIME",
        "disch_time": "DISCHTIME",
        "admission_type": "ADMISSION_TYPE",
        "diagnosis": "DIAGNOSIS",
        # The admission-level flag; a patient-level EXPIRE_FLAG also exists
        # in PATIENTS but the removal rule operates on admissions.
        "expire_flag": "HOSPITAL_EXPIRE_FLAG",
    },
    "icustays": {
        "file": "ICUSTAYS.csv",
        "subject_id": "SUBJECT_ID",
        "hadm_id": "HADM_ID",
        "icustay_id": "ICUSTAY_ID",
        "in_time": "INTIME",
        "out_time": "OUTTIME",
        "los": "LOS",
    },
    "diagnoses_icd": {
        "file": "DIAGNOSES_ICD.csv",
        "subject_id": "SUBJECT_ID",
        "hadm_id": "HADM_ID",
        "icd9_code": "ICD9_CODE",
    },
    "prescriptions": {
        "file": "PRESCRIPTIONS.csv",
        "subject_id": "SUBJECT_ID",
        "hadm_id": "HADM_ID",
        "icustay_id": "ICUSTAY_ID",
        "drug": "DRUG",
    },
    "chartevents": {
        "file": "CHARTEVENTS.csv",
        "subject_id": "SUBJECT_ID",
        "hadm_id": "HADM_ID",
        "icustay_id": "ICUSTAY_ID",
        "item_key": "ITEMID",
        "value_num": "VALUENUM",
    },
    "patients": {
        "file": "PATIENTS.csv",
        "subject_id": "SUBJECT_ID",
        "dob": "DOB",
        "gender": "GENDER",
    },
}


@dataclass(frozen=True)
class Admission:
    subject_id: str
    hadm_id: str
    admit_time: datetime | None
    disch_time: datetime | None
    admission_type: str
    diagnosis: str
    expire_flag: int


@dataclass(frozen=True)
class IcuStay:
    subject_id: str
    hadm_id: str
    icustay_id: str
    in_time: datetime | None
    out_time: datetime | None
    los: float | None  # fractional days


@dataclass(frozen=True)
class DiagnosisIcd:
    subject_id: str
    hadm_id: str
    icd9_code: str


@dataclass(frozen=True)
class Prescription:
    subject_id: str
    hadm_id: str
    icustay_id: str
    drug: str


@dataclass(frozen=True)
class ChartEvent:
    subject_id: str
    hadm_id: str
    icustay_id: str
    item_key: str
    value_num: float | None


@dataclass(frozen=True)
class PatientRow:
    subject_id: str
    dob: datetime | None
    gender: str


@dataclass(frozen=True)
class RawTables:
    admissions: list[Admission]
    icustays: list[IcuStay]
    diagnoses_icd: list[DiagnosisIcd]
    prescriptions: list[Prescription]
    chartevents: list[ChartEvent]
    patients: list[PatientRow]


@dataclass(frozen=True)
class CohortConfig:
    diagnosis_keyword: str = "cancer"
    icd9_prefixes: tuple[str, ...] = ("162",)
    los_threshold_days: float = 7.0
    age_cutoff_years: float = 60.0
    medication_keys: tuple[str, ...] = ()
    lab_keys: tuple[str, ...] = ()

    def __post_init__(self):
        if self.los_threshold_days <= 0:
            raise ValueError("los_threshold_days must be positive")
        if not self.icd9_prefixes:
            raise ValueError("at least one ICD-9 prefix is required")


@dataclass(frozen=True)
class CohortRow:
    subject_id: str
    last_hadm_id: str
    last_icustay_id: str
    los: float
    gender: str
    age_years: float | None
    admission_type: str


@dataclass(frozen=True)
class CohortTable:
    rows: list[CohortRow] = field(default_factory=list)

    def subject_ids(self) -> list[str]:
        return [r.subject_id for r in self.rows]


def _parse_float(cell: str) -> float | None:
    try:
        v = float(cell)
    except (TypeError, ValueError):
        return None
    return v if np.isfinite(v) else None


def _parse_time(cell: str) -> datetime | None:
    if not cell:
        return None
    try:
        return datetime.fromisoformat(cell.strip())
    except ValueError:
        return None


def _parse_flag(cell: str) -> int:
    v = _parse_float(cell)
    return 1 if v == 1 else 0


def _read_table(directory: Path, table: str, colmap: dict, required: list[str]):
    """Read one CSV and yield per-row dicts keyed by canonical field name."""
    path = directory / colmap["file"]
    if not path.exists():
        raise FileNotFoundError(f"{table.upper()}: file {colmap['file']!r} not found in {directory}")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for key in required:
            if colmap[key] not in header:
                raise ValueError(f"{table.upper()}: column {colmap[key]!r} not found")
        for raw in reader:
            yield {key: (raw.get(colmap[key]) or "").strip() for key in required}


def load_tables(directory, schema: dict | None = None) -> RawTables:
    """Load the six MIMIC-shaped CSV files from ``directory``.

    ``schema`` overrides entries of :data:`DEFAULT_SCHEMA` (table ->
    {field -> column name, "file" -> filename}).  Unparseable numeric
    cells become missing values; row order is preserved.
    """
    directory = Path(directory)
    colmaps = {}
    schema = schema or {}
    for table, defaults in DEFAULT_SCHEMA.items():
        merged = dict(defaults)
        merged.update(schema.get(table, {}))
        colmaps[table] = merged

    admissions = [
        Admission(
            subject_id=r["subject_id"],
            hadm_id=r["hadm_id"],
            admit_time=_parse_time(r["admit_time"]),
            disch_time=_parse_time(r["disch_time"]),
            admission_type=r["admission_type"],
            diagnosis=r["diagnosis"],
            expire_flag=_parse_flag(r["expire_flag"]),
        )
        for r in _read_table(directory, "admissions", colmaps["admissions"],
                             ["subject_id", "hadm_id", "admit_time", "disch_time",
                              "admission_type", "diagnosis", "expire_flag"])
    ]
    icustays = [
        IcuStay(
            subject_id=r["subject_id"],
            hadm_id=r["hadm_id"],
            icustay_id=r["icustay_id"],
            in_time=_parse_time(r["in_time"]),
            out_time=_parse_time(r["out_time"]),
            los=_parse_float(r["los"]),
        )
        for r in _read_table(directory, "icustays", colmaps["icustays"],
                             ["subject_id", "hadm_id", "icustay_id", "in_time",
                              "out_time", "los"])
    ]
    diagnoses = [
        DiagnosisIcd(subject_id=r["subject_id"], hadm_id=r["hadm_id"], icd9_code=r["icd9_code"])
        for r in _read_table(directory, "diagnoses_icd", colmaps["diagnoses_icd"],
                             ["subject_id", "hadm_id", "icd9_code"])
    ]
    prescriptions = [
        Prescription(subject_id=r["subject_id"], hadm_id=r["hadm_id"],
                     icustay_id=r["icustay_id"], drug=r["drug"])
        for r in _read_table(directory, "prescriptions", colmaps["prescriptions"],
                             ["subject_id", "hadm_id", "icustay_id", "drug"])
    ]
    chartevents = [
        ChartEvent(subject_id=r["subject_id"], hadm_id=r["hadm_id"],
                   icustay_id=r["icustay_id"], item_key=r["item_key"],
                   value_num=_parse_float(r["value_num"]))
        for r in _read_table(directory, "chartevents", colmaps["chartevents"],
                             ["subject_id", "hadm_id", "icustay_id", "item_key", "value_num"])
    ]
    patients = [
        PatientRow(subject_id=r["subject_id"], dob=_parse_time(r["dob"]), gender=r["gender"])
        for r in _read_table(directory, "patients", colmaps["patients"],
                             ["subject_id", "dob", "gender"])
    ]
    return RawTables(admissions=admissions, icustays=icustays, diagnoses_icd=diagnoses,
                     prescriptions=prescriptions, chartevents=chartevents, patients=patients)


def _id_key(s: str):
    # numeric ids compare numerically, anything else lexically
    return (0, int(s), "") if s.isdigit() else (1, 0, s)


def _stay_los(stay: IcuStay) -> float | None:
    """LOS in days for one ICU stay; falls back to out-in when LOS is missing."""
    if stay.los is not None and stay.los >= 0:
        return float(stay.los)
    if stay.in_time is not None and stay.out_time is not None:
        days = (stay.out_time - stay.in_time).total_seconds() / 86400.0
        if days >= 0:
            return days
    return None


def extract_cohort(tables: RawTables, cfg: CohortConfig) -> CohortTable:
    """Apply the four extraction rules and return one row per surviving subject."""
    keyword = cfg.diagnosis_keyword.lower()

    # rule 1: admission-level expire-flag removal
    admissions = [a for a in tables.admissions if a.expire_flag != 1 and a.hadm_id]

    by_subject: dict[str, list[Admission]] = {}
    for a in admissions:
        by_subject.setdefault(a.subject_id, []).append(a)

    # ICU stays with a usable id and length of stay, grouped by admission
    stays_by_hadm: dict[str, list[IcuStay]] = {}
    for s in tables.icustays:
        if s.icustay_id and _stay_los(s) is not None:
            stays_by_hadm.setdefault(s.hadm_id, []).append(s)

    # rule 3 lookup: subjects with a qualifying ICD-9 code
    icd_subjects = {
        d.subject_id
        for d in tables.diagnoses_icd
        if any(d.icd9_code.startswith(p) for p in cfg.icd9_prefixes)
    }

    genders = {p.subject_id: p.gender for p in tables.patients}
    dobs = {p.subject_id: p.dob for p in tables.patients}

    rows = []
    for subject_id in sorted(by_subject):
        subj_admissions = by_subject[subject_id]
        # rule 2: keyword in some surviving admission's diagnosis text
        if not any(keyword in a.diagnosis.lower() for a in subj_admissions):
            continue
        # rule 2: must have an ICU stay attached to a surviving admission
        eligible = [a for a in subj_admissions if stays_by_hadm.get(a.hadm_id)]
        if not eligible:
            continue
        # rule 3: ICD-9 prefix filter
        if subject_id not in icd_subjects:
            continue
        # rule 4: latest admission by admit time, ties to the larger hadm_id
        last = max(eligible, key=lambda a: (a.admit_time or datetime.min, _id_key(a.hadm_id)))
        stays = stays_by_hadm[last.hadm_id]
        stay = max(stays, key=lambda s: (s.in_time or datetime.min, _id_key(s.icustay_id)))

        age = None
        dob = dobs.get(subject_id)
        if dob is not None and last.admit_time is not None:
            age = float(int((last.admit_time - dob).days / 365.25))
        rows.append(CohortRow(
            subject_id=subject_id,
            last_hadm_id=last.hadm_id,
            last_icustay_id=stay.icustay_id,
            los=_stay_los(stay),
            gender=genders.get(subject_id, ""),
            age_years=age,
            admission_type=last.admission_type,
        ))
    return CohortTable(rows=rows)


def label_los(los: float, threshold: float) -> int:
    """1 for a long stay (strictly more than ``threshold`` days), else 0."""
    if los < 0:
        raise ValueError(f"negative length of stay: {los}")
    return 1 if los > threshold else 0


def _normalize_key(s: str) -> str:
    # med/lab keys are matched lowercase with spaces stripped, by containment
    return s.lower().replace(" ", "")


def build_dataset(cohort: CohortTable, tables: RawTables, cfg: CohortConfig) -> Dataset:
    """Assemble the per-patient feature matrix and LOS label.

    Column layout: one binary column per medication key, gender, the
    age-over-cutoff flag, a one-hot over admission types seen in the
    cohort (lexicographic), then one numeric mean column per lab key.
    """
    med_keys = [_normalize_key(k) for k in cfg.medication_keys]
    lab_keys = [_normalize_key(k) for k in cfg.lab_keys]
    seen: set[str] = set()
    for k in med_keys + lab_keys:
        if k in seen:
            raise ValueError(f"duplicate feature key {k!r}; medication and lab keys must be disjoint")
        seen.add(k)

    drugs_by_subject: dict[str, list[str]] = {}
    for p in tables.prescriptions:
        drugs_by_subject.setdefault(p.subject_id, []).append(_normalize_key(p.drug))
    events_by_subject: dict[str, list[tuple[str, float]]] = {}
    for e in tables.chartevents:
        if e.value_num is not None:
            events_by_subject.setdefault(e.subject_id, []).append(
                (_normalize_key(e.item_key), e.value_num))

    adm_types = sorted({r.admission_type for r in cohort.rows})
    columns = (
        [Column(f"med_{k}", BINARY) for k in med_keys]
        + [Column("gender_male", BINARY),
           Column(f"age_gt_{cfg.age_cutoff_years:g}", BINARY)]
        + [Column(f"admtype_{_normalize_key(t) or 'unknown'}", BINARY) for t in adm_types]
        + [Column(f"lab_{k}", NUMERIC) for k in lab_keys]
    )

    n = len(cohort.rows)
    x = np.full((n, len(columns)), np.nan)
    y = np.zeros(n, dtype=np.int64)
    for i, row in enumerate(cohort.rows):
        drugs = drugs_by_subject.get(row.subject_id, [])
        feats = [1.0 if any(k in d for d in drugs) else 0.0 for k in med_keys]
        feats.append(1.0 if row.gender.upper().startswith("M") else 0.0)
        feats.append(1.0 if row.age_years is not None and row.age_years > cfg.age_cutoff_years else 0.0)
        feats.extend(1.0 if row.admission_type == t else 0.0 for t in adm_types)
        events = events_by_subject.get(row.subject_id, [])
        for k in lab_keys:
            values = [v for key, v in events if k in key]
            feats.append(float(np.mean(values)) if values else np.nan)
        x[i] = feats
        y[i] = label_los(row.los, cfg.los_threshold_days)
    provenance = np.full(n, ORIGINAL, dtype=object)
    return Dataset(columns=tuple(columns), x=x, y=y, provenance=provenance,
                   meta={"source": "cohort_etl", "cohort_size": str(n)})
