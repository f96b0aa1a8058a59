def execute_command(image):
    image_patch = ImagePatch(image)
    cone_patches = image_patch.find('cone')
    for cone in cone_patches:
        if cone.verify_property('cone', 'orange'):
            return {'function': 'navigate_to_object', 'inputs': (cone.horizontal_center, cone.vertical_center), 'box': [cone.left, cone.lower, cone.right, cone.upper]}
    return {'function': 'None', 'error': 'No orange cone found.'}
