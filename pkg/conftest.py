import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'tensorlab.settings')
django.setup()
