"""Distillation package: full-precision teacher and the KD objective."""

from .teacher import TeacherCache, kd_loss, teacher_predict, train_teacher

__all__ = ["TeacherCache", "kd_loss", "teacher_predict", "train_teacher"]
