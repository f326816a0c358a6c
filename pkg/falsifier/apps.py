from django.apps import AppConfig


class FalsifierConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'falsifier'
