from setuptools import setup

setup(name='bergosc',
      version='0.1.0',
      description='Oscillation functionals, Toeplitz finite sections and Fredholm indices on the Bergman space of the disc',
      packages=['bergosc'],
      python_requires='>=3.8',
      install_requires=[
          'numpy>=1.20',
          'scipy>=1.6',
          'numba>=0.53',
          'joblib',
          'tqdm',
          'matplotlib',
          'seaborn'],
      extras_require={'test': ['pytest']},
      entry_points={'console_scripts': ['bergosc=bergosc.cli:main']},
      )
