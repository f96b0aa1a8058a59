def execute_command(image):
    image_patch = ImagePatch(image)
    table_patches = image_patch.find('table')
    helmet_patches = image_patch.find('helmet')
    if len(table_patches) == 0 or len(helmet_patches) == 0:
        return {'function': 'None', 'error': 'Could not find both objects.'}
    table = table_patches[0]
    helmet_patches.sort(key=lambda x: distance(x, table))
    helmet = helmet_patches[0]
    return {'function': 'navigate_to_object', 'inputs': (helmet.horizontal_center, helmet.vertical_center), 'box': [helmet.left, helmet.lower, helmet.right, helmet.upper]}
