from django.db import models


class VerificationRun(models.Model):
    """
    Uma execução de `verify` guardada com o relatório completo.
    """
    surface = models.CharField(max_length=255)
    n = models.PositiveIntegerField()
    eps_blocks = models.CharField(max_length=255)  # ex.: "1,-1"
    seed = models.IntegerField()
    passed = models.BooleanField(default=False)
    signature = models.IntegerField(null=True, blank=True)
    max_normalized_ricci = models.FloatField(null=True, blank=True)
    points_evaluated = models.PositiveIntegerField(default=0)
    points_skipped = models.PositiveIntegerField(default=0)

    # relatório JSON tal como impresso pelo comando
    report = models.JSONField()

    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        db_table = 'verification_runs'
        ordering = ['-created_at']

    def __str__(self):
        return f"Run {self.id} - {self.surface} n={self.n} - {'pass' if self.passed else 'fail'}"

    @classmethod
    def from_report(cls, report):
        config = report['config']
        return cls.objects.create(
            surface=report['surface'],
            n=config['n'],
            eps_blocks=','.join(str(sign) for sign in config['eps_blocks']),
            seed=report['seed'],
            passed=report['pass'],
            signature=report['signature'],
            max_normalized_ricci=report['ricci']['max_normalized'],
            points_evaluated=report['points_evaluated'],
            points_skipped=report['points_skipped'],
            report=report,
        )
