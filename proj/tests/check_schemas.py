"""Validates the shipped fixtures against the JSON schemas in schemas/."""

import json
import pathlib
import sys

import jsonschema

root = pathlib.Path(sys.argv[1])


def load(path):
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def check(schema_name, document):
    schema = load(root / "schemas" / schema_name)
    jsonschema.Draft202012Validator.check_schema(schema)
    jsonschema.Draft202012Validator(schema).validate(document)


def rejects(schema_name, document):
    schema = load(root / "schemas" / schema_name)
    return not jsonschema.Draft202012Validator(schema).is_valid(document)


check("kb.schema.json", load(root / "data" / "demo.kb"))
check("record.schema.json", load(root / "data" / "demo.rec"))
check("report.schema.json", load(root / "data" / "golden" / "demo.report.json"))
for finding in [
    {"type": "history", "aspect": "smoking", "value": 1},
    {"type": "recalled_symptom", "disease": "prior_tuberculosis", "symptom": "night_sweats"},
    {"type": "problem", "problem": "cough", "profile": {"duration_weeks": 4}},
    {"type": "observation", "sign": "murmur", "values": {"loudness": 0.6}},
    {"type": "test_result", "test": "serum_cholesterol", "value": 650},
    {"type": "test_result", "test": "chest_xray", "aspects": [22.5, 5]},
    {"type": "alpha", "value": None},
]:
    check("finding.schema.json", finding)

bad_kb = load(root / "data" / "demo.kb")
bad_kb["alpha"] = 1.2
assert rejects("kb.schema.json", bad_kb), "alpha 1.2 accepted"
assert rejects("finding.schema.json", {"type": "alpha", "value": 2}), "alpha 2 accepted"
assert rejects("record.schema.json", {"direct_history": {"smoking": 2}}), "history answer 2 accepted"
print("schemas ok")
