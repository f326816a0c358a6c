"""
Report records: one JSON object per line, rendered by DRF's JSONRenderer
with the compact settings in ``REST_FRAMEWORK``.

Records carry no timestamps, so equal inputs render to equal bytes. Floats
that JSON cannot hold are written as the strings "inf", "-inf" and "nan".
"""
import json
import math

import numpy as np
from jsonschema import Draft202012Validator
from rest_framework.renderers import JSONRenderer

from spaces.reports import MAX_KEPT_VIOLATIONS, Verdict
from spaces.serializers import CheckReportSerializer

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_INFEASIBLE = 2
EXIT_CONFIG_ERROR = 3

_number = {'type': ['number', 'string']}

RECORD_SCHEMA = {
    '$schema': 'https://json-schema.org/draft/2020-12/schema',
    'type': 'object',
    'required': ['check', 'operation', 'seed', 'budget', 'verdict', 'samples_run', 'violation_count',
                 'violations', 'infeasible', 'details', 'parts', 'witness'],
    'additionalProperties': False,
    'properties': {
        'check': {'type': 'string'},
        'operation': {'type': 'string'},
        'seed': {'type': 'integer', 'minimum': 0},
        'budget': {
            'type': 'object',
            'required': ['n_vectors', 'n_scalar_pairs', 't_grid', 'epsilon', 'seed'],
        },
        'verdict': {'enum': list(Verdict.values)},
        'samples_run': {'type': 'integer', 'minimum': 0},
        'violation_count': {'type': 'integer', 'minimum': 0},
        'violations': {'type': 'array', 'maxItems': MAX_KEPT_VIOLATIONS, 'items': {'$ref': '#/$defs/violation'}},
        'infeasible': {'type': ['string', 'null']},
        'details': {'type': 'object'},
        'parts': {'type': 'array', 'items': {'$ref': '#/$defs/part'}},
        'witness': {'type': ['object', 'null']},
    },
    '$defs': {
        'violation': {
            'type': 'object',
            'required': ['inputs', 'lhs', 'rhs'],
            'properties': {'inputs': {'type': 'object'}, 'lhs': _number, 'rhs': _number},
        },
        'part': {
            'type': 'object',
            'required': ['check', 'verdict', 'violation_count'],
            'properties': {
                'verdict': {'enum': list(Verdict.values)},
                'parts': {'type': 'array', 'items': {'$ref': '#/$defs/part'}},
            },
        },
    },
}

_validator = Draft202012Validator(RECORD_SCHEMA)


def sanitize(value):
    """Plain JSON values: numpy scalars unwrapped, tuples as lists, non-finite floats as strings."""
    if isinstance(value, dict):
        return {str(key): sanitize(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [sanitize(item) for item in value]
    if isinstance(value, np.ndarray):
        return sanitize(value.tolist())
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float):
        if math.isnan(value):
            return 'nan'
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
    return value


def build_record(operation, report, budget, witness=None):
    data = CheckReportSerializer(report).data
    return sanitize({
        'check': data['check'],
        'operation': operation,
        'seed': budget.rng_seed,
        'budget': budget.as_dict(),
        'verdict': data['verdict'],
        'samples_run': data['samples_run'],
        'violation_count': data['violation_count'],
        'violations': data['violations'],
        'infeasible': data['infeasible'],
        'details': data['details'],
        'parts': data['parts'],
        'witness': witness,
    })


def render_record(record):
    return JSONRenderer().render(record) + b'\n'


def render_report(records):
    return b''.join(render_record(record) for record in records)


def parse_report(content):
    """Records of a rendered report, each validated against ``RECORD_SCHEMA``."""
    if isinstance(content, bytes):
        content = content.decode('utf-8')
    records = []
    for line in content.splitlines():
        if not line.strip():
            continue
        record = json.loads(line)
        _validator.validate(record)
        records.append(record)
    return records


def exit_code(records):
    """1 when any record has violations, else 2 when any is infeasible, else 0."""
    verdicts = {record['verdict'] for record in records}
    if Verdict.FAIL in verdicts:
        return EXIT_VIOLATIONS
    if Verdict.INFEASIBLE in verdicts:
        return EXIT_INFEASIBLE
    return EXIT_OK
