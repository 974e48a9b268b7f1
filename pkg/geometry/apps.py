from django.apps import AppConfig


class GeometryConfig(AppConfig):
    """
    Biblioteca numérica; registrada só para o executor de testes do Django.
    """
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'geometry'
