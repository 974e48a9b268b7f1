from rest_framework import serializers

from geometry.surfaces import BUILDERS

from .models import VerificationRun


class VerificationRunSerializer(serializers.ModelSerializer):
    class Meta:
        model = VerificationRun
        fields = [
            'id', 'surface', 'n', 'eps_blocks', 'seed', 'passed', 'signature', 'max_normalized_ricci',
            'points_evaluated', 'points_skipped', 'report', 'created_at',
        ]
        read_only_fields = fields


class SurfaceSerializer(serializers.Serializer):
    """
    Uma entrada do catálogo (SurfaceSpec) para leitura.
    """
    name = serializers.CharField()
    description = serializers.CharField()
    non_minimal = serializers.BooleanField()
    ambient = serializers.SerializerMethodField()
    domain = serializers.SerializerMethodField()
    parameters = serializers.DictField()

    def get_ambient(self, obj):
        return obj.ambient.as_dict()

    def get_domain(self, obj):
        return obj.domain.as_list()


class VerifyRequestSerializer(serializers.Serializer):
    surface = serializers.ChoiceField(choices=sorted(BUILDERS))
    params = serializers.DictField(child=serializers.CharField(), default=dict)
    n = serializers.IntegerField(min_value=1, default=1)
    eps_blocks = serializers.CharField(allow_blank=True, default='')
    e0 = serializers.FloatField(default=0.0)
    m1 = serializers.FloatField(default=0.0)
    n1 = serializers.FloatField(default=0.0)
    samples = serializers.IntegerField(min_value=1, max_value=2000, required=False)
    seed = serializers.IntegerField(required=False)
    tol = serializers.FloatField(min_value=0, required=False)
    oracle = serializers.BooleanField(default=False)
    save = serializers.BooleanField(default=True)

    def option_kwargs(self):
        data = dict(self.validated_data)
        data.pop('save')
        data['params'] = [f'{key}={value}' for key, value in data.pop('params').items()]
        return data
