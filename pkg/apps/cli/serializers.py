"""
Run configuration serializers.

Validation errors nest per key, so ``flatten_errors`` can name the dotted
path of every failing field.
"""
import math

from django.conf import settings
from rest_framework import serializers

from apps.core.constants import MAX_TOL, MIN_GRID_NODES, MIN_SAMPLES, MIN_TOL, MIN_TRUNCATION
from apps.core.exceptions import DomainError
from apps.core.models import Boundary, Datum, DatumKind
from apps.core.utils import load_tabulated_datum
from apps.core.validators import validate_order
from apps.phaseplane.models import Branch

from .models import Command, OutputFormat


class StrictKeysMixin:
    """Reject keys the serializer does not declare."""

    def to_internal_value(self, data):
        if isinstance(data, dict):
            unknown = sorted(set(data) - set(self.fields))
            if unknown:
                raise serializers.ValidationError({key: ['Unknown key.'] for key in unknown})
        return super().to_internal_value(data)


class DatumSerializer(StrictKeysMixin, serializers.Serializer):
    kind = serializers.ChoiceField(choices=[kind.value for kind in DatumKind], default=DatumKind.ZERO.value)
    c = serializers.FloatField(default=1.0)
    p = serializers.FloatField(required=False)
    a = serializers.FloatField(required=False)
    b = serializers.FloatField(required=False)
    path = serializers.CharField(required=False)

    REQUIRED = {
        DatumKind.POWER_LAW.value: ('p',),
        DatumKind.INDICATOR.value: ('a', 'b'),
        DatumKind.TABULATED.value: ('path',),
    }

    def validate(self, attrs):
        missing = [key for key in self.REQUIRED.get(attrs['kind'], ()) if key not in attrs]
        if missing:
            raise serializers.ValidationError({key: ['Required for this datum kind.'] for key in missing})
        return attrs

    @staticmethod
    def build(attrs):
        kind = DatumKind(attrs['kind'])
        if kind is DatumKind.ZERO:
            return Datum.zero()
        if kind is DatumKind.POWER_LAW:
            return Datum.power_law(attrs['c'], attrs['p'])
        if kind is DatumKind.INDICATOR:
            return Datum.indicator(attrs['a'], attrs['b'], attrs['c'])
        return load_tabulated_datum(attrs['path'])


def _knob(name):
    return settings.KHESSIAN_SETTINGS[name]


class NumericSerializer(StrictKeysMixin, serializers.Serializer):
    tol = serializers.FloatField(default=lambda: _knob('DEFAULT_TOL'), min_value=MIN_TOL, max_value=MAX_TOL)
    T = serializers.FloatField(default=lambda: _knob('DEFAULT_T'), min_value=MIN_TRUNCATION)
    grid_nodes = serializers.IntegerField(default=lambda: _knob('GRID_NODES'), min_value=MIN_GRID_NODES)
    s_window = serializers.ListField(
        child=serializers.FloatField(), min_length=2, max_length=2, default=lambda: list(_knob('S_WINDOW')),
    )
    n_samples = serializers.IntegerField(default=lambda: _knob('N_SAMPLES'), min_value=MIN_SAMPLES)
    lambda_step = serializers.FloatField(default=lambda: _knob('LAMBDA_STEP'))
    lambda_max = serializers.FloatField(default=lambda: _knob('LAMBDA_MAX'))
    horizon = serializers.FloatField(default=lambda: _knob('HORIZON'))
    workers = serializers.IntegerField(required=False, min_value=1)

    def validate_s_window(self, value):
        if value[0] >= value[1]:
            raise serializers.ValidationError('Window must be increasing.')
        return value

    def validate_lambda_step(self, value):
        if value <= 0:
            raise serializers.ValidationError('Must be positive.')
        return value

    def validate_lambda_max(self, value):
        if value <= 0:
            raise serializers.ValidationError('Must be positive.')
        return value

    def validate_horizon(self, value):
        if value <= 0:
            raise serializers.ValidationError('Must be positive.')
        return value


class OutputSerializer(StrictKeysMixin, serializers.Serializer):
    directory = serializers.CharField(default=lambda: _knob('OUTPUT_DIR'))
    formats = serializers.MultipleChoiceField(
        choices=[fmt.value for fmt in OutputFormat], default=lambda: {fmt.value for fmt in OutputFormat},
    )

    def validate_formats(self, value):
        if not value:
            raise serializers.ValidationError('Choose at least one format.')
        return value


class RunConfigSerializer(StrictKeysMixin, serializers.Serializer):
    command = serializers.ChoiceField(choices=[command.value for command in Command])
    k = serializers.IntegerField(default=2)
    N = serializers.IntegerField()
    boundary = serializers.ChoiceField(choices=[b.value for b in Boundary], default=Boundary.DIRICHLET.value)
    datum = DatumSerializer(required=False)
    manifold_branch = serializers.ChoiceField(choices=[b.value for b in Branch], default=Branch.STABLE_RIGHT.value)
    radius = serializers.FloatField(default=1.0)
    numeric = NumericSerializer(required=False)
    output = OutputSerializer(required=False)

    def get_fields(self):
        fields = super().get_fields()
        # not a valid attribute name
        fields['lambda'] = serializers.FloatField(default=0.0)
        return fields

    def to_internal_value(self, data):
        if isinstance(data, dict):
            data = {'datum': {}, 'numeric': {}, 'output': {}, **data}
        return super().to_internal_value(data)

    def validate_N(self, value):
        if value < 2:
            raise serializers.ValidationError(f'N must be at least 2, got {value}.')
        return value

    def validate_radius(self, value):
        if not math.isfinite(value) or value <= 0:
            raise serializers.ValidationError('Must be positive and finite.')
        return value

    def validate_lambda(self, value):
        if not math.isfinite(value):
            raise serializers.ValidationError('Must be finite.')
        return value

    def validate(self, attrs):
        try:
            validate_order(attrs['k'], attrs['N'])
        except DomainError as e:
            raise serializers.ValidationError({'k': list(e.messages)})
        return attrs


def flatten_errors(errors, prefix=''):
    """
    (dotted key path, message) pairs from nested serializer errors.
    """
    pairs = []
    if isinstance(errors, dict):
        for key, value in errors.items():
            path = prefix if key == 'non_field_errors' else (f'{prefix}.{key}' if prefix else str(key))
            pairs.extend(flatten_errors(value, path))
    elif isinstance(errors, list):
        for item in errors:
            pairs.extend(flatten_errors(item, prefix))
    else:
        pairs.append((prefix, str(errors)))
    return pairs
