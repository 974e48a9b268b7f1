"""
WSGI do ricciflat: serve a API de verificação (catálogo, execuções, verify).
"""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'ricciflat.settings')

application = get_wsgi_application()
