from rest_framework import serializers

from utils.serializers import StrictSerializer, VectorField
from .geometry import Ball


class BallSerializer(StrictSerializer):
    """(center, level, scale); the ambient space comes from the serializer context."""
    center = VectorField(required=False)
    level = serializers.FloatField()
    scale = serializers.FloatField()

    def validate_level(self, value):
        if not 0 < value < 1:
            raise serializers.ValidationError("The level must lie in (0, 1).")
        return value

    def validate_scale(self, value):
        if not value > 0:
            raise serializers.ValidationError("The scale must be positive.")
        return value

    def create(self, validated_data):
        space = self.context['space']
        center = validated_data.get('center') or [0.0] * space.dim
        try:
            return Ball(space, tuple(center), validated_data['level'], validated_data['scale'])
        except ValueError as exc:
            raise serializers.ValidationError({'center': [str(exc)]})
