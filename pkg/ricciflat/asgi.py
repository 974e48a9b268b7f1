"""
ASGI do ricciflat; mesma aplicação do WSGI para servidores assíncronos.
"""

import os

from django.core.asgi import get_asgi_application

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'ricciflat.settings')

application = get_asgi_application()
