from rest_framework import serializers


class StrictSerializer(serializers.Serializer):
    """
    Serializer that rejects keys it does not declare.
    """

    def to_internal_value(self, data):
        if isinstance(data, dict):
            unknown = sorted(set(data) - set(self.fields))
            if unknown:
                raise serializers.ValidationError(
                    {name: ['Unknown field.'] for name in unknown}
                )
        return super().to_internal_value(data)


class VectorField(serializers.ListField):
    """A list of finite floats."""

    def __init__(self, **kwargs):
        kwargs.setdefault('child', serializers.FloatField())
        kwargs.setdefault('min_length', 1)
        kwargs.setdefault('max_length', 8)
        super().__init__(**kwargs)
