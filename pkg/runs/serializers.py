from rest_framework import serializers

from balls.serializers import BallSerializer
from distributions.serializers import DistributionFunctionSerializer
from convergence.sequences import SequenceKind, SequenceSpec
from falsifier.generation import generate_instance
from falsifier.mutations import MutationKind, mutate
from falsifier.registry import PREDICATES
from spaces.instances import Family
from spaces.serializers import BudgetSerializer, InstanceSerializer
from utils.serializers import StrictSerializer, VectorField

OPERATIONS = (
    'check-axioms',
    'check-delta2',
    'check-homogeneous',
    'check-upsilon',
    'ball-identities',
    'witness-refine',
    'witness-separate',
    'witness-continuity',
    'check-convergence',
    'falsify',
)


class AxiomsParamsSerializer(StrictSerializer):
    modular = serializers.BooleanField(required=False, default=False)


class UpsilonParamsSerializer(StrictSerializer):
    function = DistributionFunctionSerializer(required=False)


class Delta2ParamsSerializer(StrictSerializer):
    c = serializers.FloatField(required=False, allow_null=True, default=None)
    candidates = serializers.ListField(child=serializers.FloatField(), required=False, allow_empty=False)

    def validate_c(self, value):
        if value is not None and not value > 0:
            raise serializers.ValidationError("The Delta_2 constant must be positive.")
        return value

    def validate_candidates(self, value):
        if any(not c > 0 for c in value):
            raise serializers.ValidationError("Delta_2 candidates must be positive.")
        return value


class HomogeneityParamsSerializer(StrictSerializer):
    beta = serializers.FloatField(required=False, allow_null=True, default=None)

    def validate_beta(self, value):
        if value is not None and not 0 < value <= 1:
            raise serializers.ValidationError("The exponent must lie in (0, 1].")
        return value


class BallIdentitiesParamsSerializer(StrictSerializer):
    ball = serializers.DictField()
    y = VectorField(required=False)


class RefineParamsSerializer(StrictSerializer):
    ball = serializers.DictField()
    z = VectorField()
    ball_2 = serializers.DictField(required=False)


class SeparateParamsSerializer(StrictSerializer):
    x = VectorField()
    y = VectorField(required=False)
    homogeneous = serializers.BooleanField(required=False, default=False)

    def validate(self, data):
        if not data['homogeneous'] and 'y' not in data:
            raise serializers.ValidationError({'y': ["Separation of two points needs y."]})
        return data


class ContinuityParamsSerializer(StrictSerializer):
    target = serializers.DictField()
    lam = serializers.FloatField(required=False, default=1.0)


class SequenceSerializer(StrictSerializer):
    kind = serializers.ChoiceField(choices=SequenceKind.choices)
    x = VectorField()
    v = VectorField()
    q = serializers.FloatField(required=False, allow_null=True, default=None)
    candidate_limit = VectorField(required=False)

    def validate(self, data):
        try:
            data['sequence'] = SequenceSpec(
                data['kind'], tuple(data['x']), tuple(data['v']), q=data['q'],
                candidate_limit=tuple(data['candidate_limit']) if 'candidate_limit' in data else None,
            )
        except ValueError as exc:
            raise serializers.ValidationError(str(exc))
        return data


class ConvergenceParamsSerializer(StrictSerializer):
    sequence = SequenceSerializer()
    epsilon = serializers.FloatField(required=False, allow_null=True, default=None)
    n_max = serializers.IntegerField(required=False, min_value=1, allow_null=True, default=None)
    k = serializers.IntegerField(required=False, min_value=2, allow_null=True, default=None)


class GenerateSerializer(StrictSerializer):
    seed = serializers.IntegerField(required=False, min_value=0, default=0)
    family = serializers.ChoiceField(choices=Family.choices)


class FalsifyParamsSerializer(StrictSerializer):
    generate = GenerateSerializer(required=False)
    mutation = serializers.ChoiceField(choices=MutationKind.choices, required=False, allow_null=True, default=None)
    predicates = serializers.ListField(child=serializers.ChoiceField(choices=sorted(PREDICATES)), required=False)


PARAMS = {
    'check-axioms': AxiomsParamsSerializer,
    'check-delta2': Delta2ParamsSerializer,
    'check-homogeneous': HomogeneityParamsSerializer,
    'check-upsilon': UpsilonParamsSerializer,
    'ball-identities': BallIdentitiesParamsSerializer,
    'witness-refine': RefineParamsSerializer,
    'witness-separate': SeparateParamsSerializer,
    'witness-continuity': ContinuityParamsSerializer,
    'check-convergence': ConvergenceParamsSerializer,
    'falsify': FalsifyParamsSerializer,
}

# parameters validated once the space is known
BALL_PARAMS = ('ball', 'ball_2', 'target')
VECTOR_PARAMS = ('x', 'y', 'z')


class ConfigSerializer(StrictSerializer):
    """
    A run config: the operation, the instance it runs on, budget overrides,
    the seed and the operation parameters.

    ``falsify`` may draw its instance from ``params.generate`` instead of
    naming one.
    """
    operation = serializers.ChoiceField(choices=OPERATIONS)
    instance = InstanceSerializer(required=False)
    budget = BudgetSerializer(required=False)
    seed = serializers.IntegerField(required=False, min_value=0)
    out = serializers.CharField(required=False, allow_null=True, default=None)
    params = serializers.DictField(required=False, default=dict)

    def validate(self, data):
        operation = data['operation']
        params = PARAMS[operation](data=data['params'])
        if not params.is_valid():
            raise serializers.ValidationError({'params': params.errors})
        data['params'] = params.validated_data
        data['space'] = self._space(data)
        self._check_dimensions(data['params'], data['space'].dim)
        for name in BALL_PARAMS:
            if name in data['params']:
                ball = BallSerializer(data=data['params'][name], context={'space': data['space']})
                if not ball.is_valid():
                    raise serializers.ValidationError({'params': {name: ball.errors}})
                data['params'][name] = ball.save()
        return data

    def _check_dimensions(self, params, dim):
        errors = {}
        for name in VECTOR_PARAMS:
            if name in params and len(params[name]) != dim:
                errors[name] = [f"Expected {dim} coordinates, got {len(params[name])}."]
        if 'sequence' in params and params['sequence']['sequence'].dim != dim:
            errors['sequence'] = [f"Expected a sequence in dimension {dim}, got {params['sequence']['sequence'].dim}."]
        if errors:
            raise serializers.ValidationError({'params': errors})

    def _space(self, data):
        params = data['params']
        if 'instance' in data:
            space = data['instance']['space']
        elif data['operation'] == 'falsify' and 'generate' in params:
            generate = params['generate']
            return generate_instance(generate['seed'], generate['family'], params['mutation'])
        else:
            raise serializers.ValidationError({'instance': ["This field is required."]})
        if data['operation'] == 'falsify' and params.get('mutation'):
            try:
                space = mutate(space, params['mutation'])
            except (TypeError, ValueError) as exc:
                raise serializers.ValidationError({'params': {'mutation': [str(exc)]}})
        return space

