from django.urls import path, include
from rest_framework.routers import DefaultRouter

from . import views

router = DefaultRouter()
router.register(r'runs', views.VerificationRunViewSet, basename='runs')

urlpatterns = [
    path('surfaces/', views.list_surfaces, name='list-surfaces'),
    path('verify/', views.verify_surface, name='verify-surface'),
    path('', include(router.urls)),
]
