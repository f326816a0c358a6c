import uuid

from django.db import models

from spaces.reports import Verdict


class RunRecord(models.Model):
    """One emitted report record, stored when a run asks for ``--record``."""

    class Meta:
        db_table = 'run_records'
        indexes = [models.Index(fields=['operation', 'seed'], name='run_records_operation_seed')]
        ordering = ['created_at']

    id = models.UUIDField(primary_key=True, default=uuid.uuid4, editable=False)
    operation = models.CharField(max_length=64)
    seed = models.BigIntegerField()
    verdict = models.CharField(max_length=16, choices=Verdict.choices)
    exit_code = models.PositiveSmallIntegerField()
    payload = models.JSONField()
    created_at = models.DateTimeField(auto_now_add=True)

    def __str__(self):
        return f"{self.operation} seed={self.seed} ({self.verdict})"
