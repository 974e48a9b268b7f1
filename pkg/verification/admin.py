from django.contrib import admin

from .models import VerificationRun


@admin.register(VerificationRun)
class VerificationRunAdmin(admin.ModelAdmin):
    list_display = ['id', 'surface', 'n', 'eps_blocks', 'passed', 'signature', 'max_normalized_ricci', 'created_at']
    list_filter = ['passed', 'surface', 'n']
    search_fields = ['surface']
    readonly_fields = ['report', 'created_at']
