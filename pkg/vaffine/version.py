version_major = '0'
version_minor = '1'
version_patch = '0'

version = '{}.{}.{}'.format(
    version_major,
    version_minor,
    version_patch
)
