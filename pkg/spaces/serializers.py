from rest_framework import serializers

from utils.serializers import StrictSerializer
from .budget import SampleBudget, log_grid
from .instances import Family, PMSpace
from .modulars import ClassicalModular, ModularKind


class ModularSerializer(StrictSerializer):
    kind = serializers.ChoiceField(choices=ModularKind.choices)
    exponent = serializers.FloatField(required=False, default=1.0)
    weights = serializers.ListField(child=serializers.FloatField(), required=False, default=list, max_length=8)

    def validate(self, data):
        try:
            data['modular'] = ClassicalModular(data['kind'], exponent=data['exponent'], weights=tuple(data['weights']))
        except ValueError as exc:
            raise serializers.ValidationError(str(exc))
        return data


class InstanceSerializer(StrictSerializer):
    family = serializers.ChoiceField(choices=Family.choices)
    modular = ModularSerializer()
    dim = serializers.IntegerField(min_value=1, max_value=8)
    declared_c = serializers.FloatField(required=False, allow_null=True, default=None)
    declared_beta = serializers.FloatField(required=False, allow_null=True, default=None)
    declare_true_constants = serializers.BooleanField(required=False, default=False)

    def validate(self, data):
        modular = data['modular']['modular']
        if len(modular.weights) > 1 and len(modular.weights) != data['dim']:
            raise serializers.ValidationError({'modular': ["One weight per coordinate is required."]})
        declared_c, declared_beta = data['declared_c'], data['declared_beta']
        if data['declare_true_constants']:
            declared_c = modular.delta2_constant() if declared_c is None else declared_c
            declared_beta = modular.homogeneity_exponent() if declared_beta is None else declared_beta
        try:
            reference = PMSpace.reference(data['family'], modular, data['dim'], declare=False)
            data['space'] = PMSpace(
                dim=data['dim'],
                modular_map=reference.modular_map,
                declared_c=declared_c,
                declared_beta=declared_beta,
            )
        except ValueError as exc:
            raise serializers.ValidationError(str(exc))
        return data


class BudgetSerializer(StrictSerializer):
    """Overrides of the default sample budget; everything is optional."""
    n_vectors = serializers.IntegerField(min_value=1, required=False)
    n_scalar_pairs = serializers.IntegerField(min_value=1, required=False)
    t_grid = serializers.ListField(child=serializers.FloatField(), min_length=3, max_length=3, required=False)
    epsilon = serializers.FloatField(required=False)
    witness_samples = serializers.IntegerField(min_value=1, required=False)

    def validate_t_grid(self, value):
        t_min, t_max, count = value
        if count != int(count):
            raise serializers.ValidationError("The grid count must be an integer.")
        try:
            return log_grid(t_min, t_max, int(count))
        except ValueError as exc:
            raise serializers.ValidationError(str(exc))

    def validate_epsilon(self, value):
        if not value > 0:
            raise serializers.ValidationError("Epsilon must be positive.")
        return value


def build_budget(overrides, seed=None):
    values = dict(overrides)
    if seed is not None:
        values['rng_seed'] = seed
    return SampleBudget.default(**values)


class ViolationSerializer(serializers.Serializer):
    inputs = serializers.DictField()
    lhs = serializers.FloatField()
    rhs = serializers.FloatField()


class CheckReportSerializer(serializers.Serializer):
    check = serializers.CharField()
    verdict = serializers.SerializerMethodField()
    samples_run = serializers.IntegerField()
    violation_count = serializers.IntegerField()
    violations = ViolationSerializer(many=True)
    infeasible = serializers.CharField(allow_null=True)
    details = serializers.DictField()
    parts = serializers.SerializerMethodField()

    def get_verdict(self, report):
        return report.verdict.value

    def get_parts(self, report):
        return CheckReportSerializer(report.parts, many=True).data
