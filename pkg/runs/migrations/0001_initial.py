# Generated by Django 5.1.6 on 2026-10-18 09:00

import uuid

from django.db import migrations, models


class Migration(migrations.Migration):
    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name='RunRecord',
            fields=[
                ('id', models.UUIDField(default=uuid.uuid4, editable=False, primary_key=True, serialize=False)),
                ('operation', models.CharField(max_length=64)),
                ('seed', models.BigIntegerField()),
                ('verdict', models.CharField(
                    choices=[('pass', 'Pass'), ('fail', 'Fail'), ('infeasible', 'Infeasible')], max_length=16)),
                ('exit_code', models.PositiveSmallIntegerField()),
                ('payload', models.JSONField()),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'db_table': 'run_records',
                'ordering': ['created_at'],
                'indexes': [models.Index(fields=['operation', 'seed'], name='run_records_operation_seed')],
            },
        ),
    ]
