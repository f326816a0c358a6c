from django.apps import AppConfig


class BallsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'balls'
