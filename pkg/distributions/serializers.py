from rest_framework import serializers

from utils.serializers import StrictSerializer
from .functions import DistributionFunction, Kind


class DistributionFunctionSerializer(StrictSerializer):
    """Tagged record: the kind plus its parameter or breakpoint list."""
    kind = serializers.ChoiceField(choices=Kind.choices)
    parameter = serializers.FloatField(min_value=0, required=False, default=0.0)
    breakpoints = serializers.ListField(
        child=serializers.ListField(child=serializers.FloatField(), min_length=2, max_length=2),
        required=False,
        default=list,
    )
    inclusive = serializers.BooleanField(required=False, default=False)
    origin_mass = serializers.FloatField(min_value=0, max_value=1, required=False, default=0.0)

    def validate(self, data):
        if data['kind'] == Kind.PIECEWISE_LINEAR and not data['breakpoints']:
            raise serializers.ValidationError({'breakpoints': ["A piecewise linear function needs breakpoints."]})
        try:
            data['function'] = DistributionFunction(
                kind=data['kind'],
                parameter=data['parameter'],
                breakpoints=tuple(tuple(point) for point in data['breakpoints']),
                inclusive=data['inclusive'],
                origin_mass=data['origin_mass'],
            )
        except ValueError as exc:
            raise serializers.ValidationError(str(exc))
        return data

    def create(self, validated_data):
        return validated_data['function']
