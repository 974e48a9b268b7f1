import logging

from django_filters.rest_framework import DjangoFilterBackend
from rest_framework import viewsets
from rest_framework.decorators import api_view, permission_classes
from rest_framework.filters import OrderingFilter
from rest_framework.permissions import AllowAny, IsAuthenticated
from rest_framework.response import Response

from geometry.exceptions import ConfigurationError, RicciFlatError
from geometry.surfaces import catalog

from .models import VerificationRun
from .pipeline import build_options, run_verification
from .serializers import SurfaceSerializer, VerificationRunSerializer, VerifyRequestSerializer

logger = logging.getLogger(__name__)


@api_view(['GET'])
@permission_classes([AllowAny])
def list_surfaces(request):
    """
    GET /api/surfaces/
    Catálogo de superfícies com os parâmetros padrão.
    """
    return Response(SurfaceSerializer(catalog(), many=True).data)


@api_view(['POST'])
@permission_classes([IsAuthenticated])
def verify_surface(request):
    """
    POST /api/verify/
    Body: {"surface": "scherk", "n": 2, "eps_blocks": "1,-1", "samples": 50, ...}

    Executa a verificação de forma síncrona e devolve o relatório.
    Com "save": true (padrão) a execução fica guardada em /api/runs/.
    """
    serializer = VerifyRequestSerializer(data=request.data)
    if not serializer.is_valid():
        return Response({'error': serializer.errors}, status=400)

    try:
        options = build_options(**serializer.option_kwargs())
        report = run_verification(options)
    except ConfigurationError as e:
        return Response({'error': str(e)}, status=400)
    except RicciFlatError as e:
        logger.exception("Falha na verificação")
        return Response({'error': str(e), 'reason': e.reason}, status=422)

    run_id = None
    if serializer.validated_data['save']:
        run_id = VerificationRun.from_report(report).id
    return Response({'id': run_id, 'report': report})


class VerificationRunViewSet(viewsets.ReadOnlyModelViewSet):
    queryset = VerificationRun.objects.all()
    serializer_class = VerificationRunSerializer
    filter_backends = [DjangoFilterBackend, OrderingFilter]
    filterset_fields = ['surface', 'passed', 'n']
    ordering_fields = ['created_at', 'max_normalized_ricci']
