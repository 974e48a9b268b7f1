from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='VerificationRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('surface', models.CharField(max_length=255)),
                ('n', models.PositiveIntegerField()),
                ('eps_blocks', models.CharField(max_length=255)),
                ('seed', models.IntegerField()),
                ('passed', models.BooleanField(default=False)),
                ('signature', models.IntegerField(blank=True, null=True)),
                ('max_normalized_ricci', models.FloatField(blank=True, null=True)),
                ('points_evaluated', models.PositiveIntegerField(default=0)),
                ('points_skipped', models.PositiveIntegerField(default=0)),
                ('report', models.JSONField()),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'db_table': 'verification_runs',
                'ordering': ['-created_at'],
            },
        ),
    ]
